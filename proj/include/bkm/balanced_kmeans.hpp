#pragma once
// Balanced k-means baseline: Lloyd-style alternation where the assignment
// step is solved exactly as a size-constrained transport problem (cluster k
// expanded into s_k unit-capacity slots, min-cost matching over I x I).
#include <cstdint>
#include <vector>

#include "bkm/task.hpp"

namespace bkm {

struct KmeansResult {
  Assignment assignment;
  double energy = 0.0;               // exact Gaussian energy of the result
  std::vector<double> energy_trace;  // energy after each iteration
  int iterations = 0;
  bool converged = false;  // assignment fixpoint before max_iter
};

/// Centroids initialized from `k` distinct random points (seeded); stops at an
/// assignment fixpoint or after max_iter iterations. The per-iteration energy
/// trace is non-increasing because both half-steps are exact.
KmeansResult balanced_kmeans(const ClusteringTask& t, int max_iter = 1000,
                             std::uint64_t seed = 0);

}  // namespace bkm
