#pragma once
// Boltzmann reparametrization of measured solutions.
//
// Raw sampler counts depend on the effective sampling temperature and on
// penalty leakage; the exact Gaussian energies do not. The posterior over the
// observed feasible partitions is therefore recomputed from exact energies at
// T = 1 (they are exact negative log-likelihoods), and observed counts are
// kept for diagnostics only.
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "json.hpp"

#include "bkm/sampler.hpp"
#include "bkm/task.hpp"

namespace bkm {

struct PosteriorRow {
  PartitionKey partition;
  double energy = 0.0;       // exact Gaussian energy E(X|Z)
  double probability = 0.0;  // exp(-E) normalized over observed partitions
  std::int64_t observed_count = 0;
};

struct PosteriorTable {
  // Descending probability; equal-energy ties ordered by partition key.
  std::vector<PosteriorRow> rows;
  double feasible_fraction = 0.0;  // share of reads that were feasible
};

struct empty_posterior_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Exact Gaussian energy sum_k 1/2 sum_{i in k} |x_i - mean_k|^2 with
/// maximum-likelihood cluster means. Throws std::invalid_argument when the
/// assignment is infeasible for the task.
double exact_energy(const ClusteringTask& t, const Assignment& a);

/// Share of reads whose vector is a feasible assignment.
double feasible_fraction(const SampleSet& s, const ClusteringTask& t);

/// Filters infeasible entries, merges label permutations, recomputes exact
/// energies, and normalizes exp(-E) over the observed partitions
/// (log-sum-exp stabilized). Throws empty_posterior_error when no feasible
/// entry exists.
PosteriorTable reparametrize(const SampleSet& s, const ClusteringTask& t);

/// Gold posterior: reparametrize over the complete exhaustive sample set.
PosteriorTable exact_posterior(const ClusteringTask& t,
                               std::uint64_t cap = 10'000'000);

/// Top row; ties already resolved by the table ordering (lexicographically
/// smallest key among equal probabilities). Throws on an empty table.
std::pair<PartitionKey, double> map_solution(const PosteriorTable& pt);

/// Export: {"feasible_fraction", "rows": [{"partition", "energy",
/// "probability", "count"}]}.
nlohmann::ordered_json posterior_to_json(const PosteriorTable& pt);
PosteriorTable posterior_from_json(const nlohmann::json& j);

}  // namespace bkm
