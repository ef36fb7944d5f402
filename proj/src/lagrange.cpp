#include "bkm/lagrange.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "bkm/balanced_kmeans.hpp"
#include "bkm/posterior.hpp"
#include "bkm/qubo.hpp"
#include "bkm/rng.hpp"

namespace bkm {

double lambda_lower_bound(const ClusteringTask& t, const Assignment& seed,
                          double lambda_floor) {
  if (!is_feasible(seed, t))
    throw std::invalid_argument("lambda_lower_bound: seed must be feasible");
  const Eigen::MatrixXd q = build_data_costs(t);
  const BitVec z = vectorize(seed, t);
  const int n = static_cast<int>(z.size());
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (z[i]) g += q.col(i);
  }
  double delta_min = 0.0;
  for (int i = 0; i < n; ++i) {
    const double sign = z[i] ? -1.0 : 1.0;
    const double delta = sign * 2.0 * g(i);  // data Q has zero diagonal
    delta_min = std::min(delta_min, delta);
  }
  return std::max(lambda_floor, -delta_min);
}

std::pair<double, double> anneal_beta_range(const ClusteringTask& t,
                                            std::uint64_t seed) {
  t.validate();
  Rng rng(derive_seed(seed, 0xda7aULL));
  std::vector<int> base;
  for (int c = 0; c < t.k; ++c) base.insert(base.end(), t.sizes[c], c);
  std::vector<double> abs_deltas;
  double uphill_sum = 0.0;
  int uphill_count = 0;
  const int n = t.num_points();
  for (int state = 0; state < 64; ++state) {
    std::vector<int> labels = base;
    rng.shuffle(labels);
    const double e0 = exact_energy(t, Assignment(labels));
    for (int swap = 0; swap < 8; ++swap) {
      const int i = rng.uniform_int(0, n - 1);
      const int j = rng.uniform_int(0, n - 1);
      if (labels[i] == labels[j]) continue;
      std::swap(labels[i], labels[j]);
      const double delta = exact_energy(t, Assignment(labels)) - e0;
      std::swap(labels[i], labels[j]);
      if (delta != 0.0) abs_deltas.push_back(std::abs(delta));
      if (delta > 0.0) {
        uphill_sum += delta;
        ++uphill_count;
      }
    }
  }
  double beta_min = 0.1;
  double beta_max = 1.0;
  if (uphill_count > 0) beta_min = -std::log(0.9) / (uphill_sum / uphill_count);
  if (!abs_deltas.empty()) {
    std::sort(abs_deltas.begin(), abs_deltas.end());
    beta_max = 10.0 / abs_deltas[abs_deltas.size() / 2];
  }
  if (!(beta_max > beta_min)) beta_max = 2.0 * beta_min;
  return {beta_min, beta_max};
}

TuneResult tune_lambda(const ClusteringTask& t, const AnnealSchedule& sched,
                       std::uint64_t seed, int max_rounds, int jobs) {
  const KmeansResult km = balanced_kmeans(t, 1000, derive_seed(seed, 0x5eedULL));
  TuneResult result;
  result.lower_bound = lambda_lower_bound(t, km.assignment);
  result.lambda = result.lower_bound;
  if (sched.beta_min > 0.0 && sched.beta_max > 0.0) {
    result.beta_min = sched.beta_min;
    result.beta_max = sched.beta_max;
  } else {
    std::tie(result.beta_min, result.beta_max) = anneal_beta_range(t, seed);
  }
  AnnealSchedule round_sched = sched;
  round_sched.beta_min = result.beta_min;
  round_sched.beta_max = result.beta_max;
  for (int round = 0; round < max_rounds; ++round) {
    const QuboProblem p = build_qubo(t, result.lambda);
    const SampleSet s = sample_sa(p, round_sched, derive_seed(seed, round), jobs);
    const double ff = feasible_fraction(s, t);
    result.rounds.push_back({result.lambda, ff});
    if (ff < 0.2) {
      result.lambda *= 2.0;
    } else if (ff > 0.8 && result.lambda > 4.0 * result.lower_bound) {
      result.lambda /= 2.0;
    } else {
      break;
    }
  }
  return result;
}

}  // namespace bkm
