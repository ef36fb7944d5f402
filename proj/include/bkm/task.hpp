#pragma once
// Core task and assignment representations shared by every other module.
//
// A clustering task fixes I points, K clusters and target sizes s_k with
// sum_k s_k = I. Assignments are stored as label vectors; the one-hot matrix
// Z (K x I) and its row-major vectorization z are produced on demand, since
// only the QUBO side needs them. All types are immutable after construction
// and safe to share across threads.
#include <Eigen/Dense>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bkm {

/// One byte per binary variable; index k*I + i corresponds to Z_ki.
using BitVec = std::vector<std::uint8_t>;

struct ClusteringTask {
  Eigen::MatrixXd points;  // I x d, one row per point
  int k = 1;
  std::vector<int> sizes;  // target cluster sizes, length k, sum = I
  std::optional<std::vector<int>> ground_truth;
  std::string task_id;
  std::uint64_t seed = 0;

  int num_points() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }
  int num_vars() const { return k * num_points(); }

  /// Throws std::invalid_argument if any invariant is violated.
  void validate() const;
};

struct Assignment {
  std::vector<int> labels;  // values in [0, K)

  Assignment() = default;
  explicit Assignment(std::vector<int> l) : labels(std::move(l)) {}

  int size() const { return static_cast<int>(labels.size()); }
  bool operator==(const Assignment&) const = default;
};

/// Canonical partition representative: clusters renumbered in order of first
/// appearance, so label permutations of one partition collapse to one key.
struct PartitionKey {
  std::vector<int> labels;

  bool operator==(const PartitionKey&) const = default;
  auto operator<=>(const PartitionKey&) const = default;
};

/// True iff every point carries a valid label and cluster k holds exactly
/// sizes[k] points. Throws std::invalid_argument on a length mismatch or an
/// out-of-range label.
bool is_feasible(const Assignment& a, const ClusteringTask& t);

PartitionKey canonicalize(const Assignment& a);
inline PartitionKey canonicalize(const PartitionKey& key) {
  return canonicalize(Assignment(key.labels));
}

/// Row-major one-hot vectorization: z[k*I + i] = 1 iff labels[i] == k.
BitVec vectorize(const Assignment& a, const ClusteringTask& t);

/// Inverse of vectorize. Throws std::invalid_argument if some point does not
/// have exactly one cluster bit set.
Assignment devectorize(const BitVec& z, const ClusteringTask& t);

/// Like devectorize but returns nullopt for non-one-hot vectors. Used when
/// filtering raw sampler output, where such vectors are expected.
std::optional<Assignment> try_devectorize(const BitVec& z,
                                          const ClusteringTask& t);

/// Number of feasible labelings, I! / prod_k s_k!, saturating at 2^64-1.
std::uint64_t labeling_count(const ClusteringTask& t);

/// Number of distinct partitions: labeling_count divided by the permutations
/// of equal-size clusters. Saturates at 2^64-1.
std::uint64_t partition_count(const ClusteringTask& t);

}  // namespace bkm
