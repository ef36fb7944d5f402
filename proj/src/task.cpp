#include "bkm/task.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace bkm {

void ClusteringTask::validate() const {
  if (k < 1) throw std::invalid_argument("task: k must be >= 1");
  if (static_cast<int>(sizes.size()) != k)
    throw std::invalid_argument("task: sizes length must equal k");
  std::int64_t total = 0;
  for (int s : sizes) {
    if (s < 1) throw std::invalid_argument("task: every cluster size must be >= 1");
    total += s;
  }
  if (total != num_points())
    throw std::invalid_argument("task: sizes must sum to the number of points (" +
                                std::to_string(total) + " vs " +
                                std::to_string(num_points()) + ")");
  if (!points.allFinite())
    throw std::invalid_argument("task: point coordinates must be finite");
  if (ground_truth && static_cast<int>(ground_truth->size()) != num_points())
    throw std::invalid_argument("task: ground_truth length must equal the number of points");
}

bool is_feasible(const Assignment& a, const ClusteringTask& t) {
  if (a.size() != t.num_points())
    throw std::invalid_argument("is_feasible: assignment length " +
                                std::to_string(a.size()) + " != point count " +
                                std::to_string(t.num_points()));
  std::vector<int> counts(t.k, 0);
  for (int l : a.labels) {
    if (l < 0 || l >= t.k)
      throw std::invalid_argument("is_feasible: label out of range [0, K)");
    ++counts[l];
  }
  for (int k = 0; k < t.k; ++k) {
    if (counts[k] != t.sizes[k]) return false;
  }
  return true;
}

PartitionKey canonicalize(const Assignment& a) {
  int max_label = -1;
  for (int l : a.labels) {
    if (l < 0) throw std::invalid_argument("canonicalize: negative label");
    max_label = std::max(max_label, l);
  }
  std::vector<int> remap(static_cast<std::size_t>(max_label) + 1, -1);
  PartitionKey key;
  key.labels.resize(a.labels.size());
  int next = 0;
  for (std::size_t i = 0; i < a.labels.size(); ++i) {
    int& slot = remap[a.labels[i]];
    if (slot < 0) slot = next++;
    key.labels[i] = slot;
  }
  return key;
}

BitVec vectorize(const Assignment& a, const ClusteringTask& t) {
  if (a.size() != t.num_points())
    throw std::invalid_argument("vectorize: assignment length mismatch");
  const int n_points = t.num_points();
  BitVec z(static_cast<std::size_t>(t.k) * n_points, 0);
  for (int i = 0; i < n_points; ++i) {
    const int l = a.labels[i];
    if (l < 0 || l >= t.k)
      throw std::invalid_argument("vectorize: label out of range [0, K)");
    z[static_cast<std::size_t>(l) * n_points + i] = 1;
  }
  return z;
}

std::optional<Assignment> try_devectorize(const BitVec& z,
                                          const ClusteringTask& t) {
  const int n_points = t.num_points();
  if (static_cast<int>(z.size()) != t.num_vars())
    throw std::invalid_argument("devectorize: vector length != K*I");
  Assignment a;
  a.labels.assign(n_points, -1);
  for (int k = 0; k < t.k; ++k) {
    const std::size_t base = static_cast<std::size_t>(k) * n_points;
    for (int i = 0; i < n_points; ++i) {
      if (!z[base + i]) continue;
      if (a.labels[i] >= 0) return std::nullopt;  // two clusters claim point i
      a.labels[i] = k;
    }
  }
  for (int i = 0; i < n_points; ++i) {
    if (a.labels[i] < 0) return std::nullopt;  // unassigned point
  }
  return a;
}

Assignment devectorize(const BitVec& z, const ClusteringTask& t) {
  auto a = try_devectorize(z, t);
  if (!a)
    throw std::invalid_argument(
        "devectorize: vector is not one-hot per point");
  return std::move(*a);
}

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

// C(n, k), saturating. Partial products of the multiplicative formula are
// themselves binomials, hence nondecreasing, so early exit on overflow is safe.
std::uint64_t binomial_sat(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 c = 1;
  for (int i = 1; i <= k; ++i) {
    c = c * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (c > kSaturated) return kSaturated;
  }
  return static_cast<std::uint64_t>(c);
}

std::uint64_t mul_sat(std::uint64_t a, std::uint64_t b) {
  if (a == kSaturated || b == kSaturated) return kSaturated;
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  return p > kSaturated ? kSaturated : static_cast<std::uint64_t>(p);
}

}  // namespace

std::uint64_t labeling_count(const ClusteringTask& t) {
  std::uint64_t total = 1;
  int remaining = t.num_points();
  for (int s : t.sizes) {
    total = mul_sat(total, binomial_sat(remaining, s));
    remaining -= s;
  }
  return total;
}

std::uint64_t partition_count(const ClusteringTask& t) {
  const std::uint64_t labelings = labeling_count(t);
  if (labelings == kSaturated) return kSaturated;
  // Permutations of equal-size clusters map labelings onto the same partition.
  std::vector<int> sorted = t.sizes;
  std::sort(sorted.begin(), sorted.end());
  std::uint64_t perms = 1;
  std::uint64_t run = 1;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] == sorted[i - 1]) {
      ++run;
      perms = mul_sat(perms, run);
    } else {
      run = 1;
    }
  }
  return labelings / perms;
}

}  // namespace bkm
