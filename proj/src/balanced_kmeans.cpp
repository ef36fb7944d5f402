#include "bkm/balanced_kmeans.hpp"

#include <Eigen/Dense>

#include "bkm/hungarian.hpp"
#include "bkm/posterior.hpp"
#include "bkm/rng.hpp"

namespace bkm {

namespace {

// Exact size-constrained assignment: point i -> slot j, slot j owned by
// cluster slot_cluster[j]. Slots of one cluster are interchangeable, so any
// min-cost matching induces the same label vector cost.
Assignment assign_to_centroids(const ClusteringTask& t,
                               const Eigen::MatrixXd& centroids,
                               const std::vector<int>& slot_cluster) {
  const int n = t.num_points();
  Eigen::MatrixXd cost(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      cost(i, j) = (t.points.row(i) - centroids.row(slot_cluster[j])).squaredNorm();
    }
  }
  const std::vector<int> row_to_col = hungarian(cost);
  Assignment a;
  a.labels.resize(n);
  for (int i = 0; i < n; ++i) a.labels[i] = slot_cluster[row_to_col[i]];
  return a;
}

Eigen::MatrixXd cluster_means(const ClusteringTask& t, const Assignment& a) {
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(t.k, t.dim());
  std::vector<int> counts(t.k, 0);
  for (int i = 0; i < t.num_points(); ++i) {
    means.row(a.labels[i]) += t.points.row(i);
    ++counts[a.labels[i]];
  }
  for (int k = 0; k < t.k; ++k) {
    if (counts[k] > 0) means.row(k) /= static_cast<double>(counts[k]);
  }
  return means;
}

}  // namespace

KmeansResult balanced_kmeans(const ClusteringTask& t, int max_iter,
                             std::uint64_t seed) {
  t.validate();
  const int n = t.num_points();
  std::vector<int> slot_cluster;
  slot_cluster.reserve(n);
  for (int k = 0; k < t.k; ++k) {
    for (int s = 0; s < t.sizes[k]; ++s) slot_cluster.push_back(k);
  }

  Rng rng(derive_seed(seed, 0x6b6dULL));
  const std::vector<int> init = rng.sample_without_replacement(n, t.k);
  Eigen::MatrixXd centroids(t.k, t.dim());
  for (int k = 0; k < t.k; ++k) centroids.row(k) = t.points.row(init[k]);

  KmeansResult result;
  Assignment prev;
  for (int iter = 0; iter < max_iter; ++iter) {
    Assignment a = assign_to_centroids(t, centroids, slot_cluster);
    centroids = cluster_means(t, a);
    result.energy_trace.push_back(exact_energy(t, a));
    result.iterations = iter + 1;
    if (iter > 0 && a.labels == prev.labels) {
      result.converged = true;
      result.assignment = std::move(a);
      break;
    }
    prev = a;
    result.assignment = std::move(a);
  }
  result.energy = result.energy_trace.back();
  return result;
}

}  // namespace bkm
