#pragma once
// Per-task penalty weight estimation: a first-order bound from a feasible
// seed solution, then multiplicative refinement driven by the feasible
// fraction of short annealing runs.
#include <cstdint>
#include <utility>
#include <vector>

#include "bkm/sampler.hpp"
#include "bkm/task.hpp"

namespace bkm {

/// Smallest lambda for which every single-bit flip away from the feasible
/// seed raises the penalized energy: the worst flip can lower the data cost
/// by at most -delta_min while any flip adds penalty of at least lambda.
/// Returns lambda_floor when no flip lowers the data cost.
double lambda_lower_bound(const ClusteringTask& t, const Assignment& seed,
                          double lambda_floor = 1e-6);

/// Inverse-temperature range matched to the task's data energy scale,
/// measured on cluster-membership swaps between random feasible assignments
/// (swaps never touch the penalty, so the range is independent of lambda and
/// the tuner's lambda updates keep their effect on feasibility). beta_min
/// targets ~0.9 acceptance of the mean uphill swap; beta_max is 10 / median
/// nonzero |dE|.
std::pair<double, double> anneal_beta_range(const ClusteringTask& t,
                                            std::uint64_t seed);

struct TuneRound {
  double lambda = 0.0;
  double feasible_fraction = 0.0;
};

struct TuneResult {
  double lambda = 0.0;
  double lower_bound = 0.0;
  double beta_min = 0.0;  // resolved range, reused for the final sampling run
  double beta_max = 0.0;
  std::vector<TuneRound> rounds;

  /// The input schedule with the tuned beta range filled in.
  AnnealSchedule schedule(const AnnealSchedule& base) const {
    AnnealSchedule out = base;
    out.beta_min = beta_min;
    out.beta_max = beta_max;
    return out;
  }
};

/// Seeds from balanced k-means, starts at lambda_lower_bound, then doubles
/// while the sampled feasible fraction is below 0.2 and halves while it is
/// above 0.8 with lambda more than 4x the bound. Always returns within
/// max_rounds sampling rounds. Zero betas in `sched` are resolved once via
/// anneal_beta_range and held fixed across rounds.
TuneResult tune_lambda(const ClusteringTask& t, const AnnealSchedule& sched,
                       std::uint64_t seed, int max_rounds = 8, int jobs = 1);

}  // namespace bkm
