#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bkm/data_io.hpp"
#include "bkm/lagrange.hpp"
#include "bkm/posterior.hpp"
#include "bkm/qubo.hpp"
#include "test_util.hpp"

using bkm::Assignment;
using bkm::BitVec;
using test_util::make_task;

TEST_CASE("coincident points fall back to the lambda floor") {
  auto t = make_task({{1, 1}, {1, 1}, {1, 1}, {1, 1}}, {2, 2});
  const double bound = bkm::lambda_lower_bound(t, Assignment({0, 0, 1, 1}));
  CHECK(bound == 1e-6);
}

TEST_CASE("bound is controlled by the largest pairwise distance") {
  auto t = make_task({{0, 0}, {1, 0}, {0, 3}, {4, 0}}, {2, 2});
  double max_d2 = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      max_d2 = std::max(max_d2,
                        (t.points.row(i) - t.points.row(j)).squaredNorm());
    }
  }
  for (const auto& labels : test_util::all_feasible_labelings(t)) {
    const Assignment seed(labels);
    const double bound = bkm::lambda_lower_bound(t, seed);
    CHECK(bound <= max_d2 + 1e-12);
  }
}

TEST_CASE("every one-flip neighbor of the seed is strictly worse") {
  for (int trial = 0; trial < 40; ++trial) {
    auto t = test_util::random_task({3, 2}, 2, 800 + trial);
    const auto labelings = test_util::all_feasible_labelings(t);
    const Assignment seed(labelings[trial % labelings.size()]);
    const double bound = bkm::lambda_lower_bound(t, seed);
    const auto p = bkm::build_qubo(t, bound);
    BitVec z = bkm::vectorize(seed, t);
    const double seed_energy = bkm::qubo_energy(p, z);
    for (int i = 0; i < t.num_vars(); ++i) {
      z[i] ^= 1;
      CHECK(bkm::qubo_energy(p, z) > seed_energy);
      z[i] ^= 1;
    }
  }
}

TEST_CASE("infeasible seed is rejected") {
  auto t = make_task({{0}, {1}}, {1, 1});
  CHECK_THROWS_AS(bkm::lambda_lower_bound(t, Assignment({0, 0})),
                  std::invalid_argument);
}

TEST_CASE("tuning never returns less than the first-order bound") {
  for (int trial = 0; trial < 5; ++trial) {
    auto t = test_util::random_task({3, 3}, 2, 900 + trial);
    bkm::AnnealSchedule sched;
    sched.reads = 300;
    const auto result = bkm::tune_lambda(t, sched, trial);
    CHECK(result.lambda >= result.lower_bound);
    CHECK(!result.rounds.empty());
    CHECK(result.rounds.size() <= 8);
  }
}

TEST_CASE("well-separated tasks settle quickly with a feasible fraction") {
  bkm::GenParams params;
  params.k = 3;
  params.n_per_cluster = 5;
  params.dim = 2;
  params.d_min = 4.0;
  params.d_max = 6.0;
  params.seed = 12345;
  const auto task = bkm::generate_task(params);
  bkm::AnnealSchedule sched;
  sched.reads = 500;
  const auto result = bkm::tune_lambda(task, sched, 1);
  CHECK(result.rounds.size() <= 3);
  CHECK(result.rounds.back().feasible_fraction >= 0.2);
}

TEST_CASE("tuned lambda keeps sampling feasible on nearly every task") {
  // Feasibility efficacy on the synthetic suite (suite seed 606): a fresh
  // sampling run at the tuned lambda must see >= 20% feasible reads on at
  // least 95% of tasks.
  const int n_tasks = 50;
  int effective = 0;
  for (int i = 0; i < n_tasks; ++i) {
    bkm::GenParams params;
    params.k = 3;
    params.n_per_cluster = 5;
    params.dim = 2;
    params.d_min = 2.0;
    params.d_max = 6.0;
    params.seed = bkm::derive_seed(606, i);
    const auto task = bkm::generate_task(params);
    bkm::AnnealSchedule sched;
    sched.reads = 500;
    const auto tuned = bkm::tune_lambda(task, sched, params.seed);
    const auto p = bkm::build_qubo(task, tuned.lambda);
    const auto fresh = bkm::sample_sa(p, tuned.schedule(sched),
                                      bkm::derive_seed(params.seed, 0xabcULL));
    if (bkm::feasible_fraction(fresh, task) >= 0.2) ++effective;
  }
  CHECK(effective >= 48);  // 95% of 50, rounded up
}

TEST_CASE("tuned lambda makes the unconstrained argmin feasible") {
  // Brute force over all 2^(K*I) vectors on tiny tasks.
  for (int trial = 0; trial < 10; ++trial) {
    auto t = test_util::random_task({2, 1}, 2, 1000 + trial);  // K*I = 6
    bkm::AnnealSchedule sched;
    sched.reads = 200;
    const auto tuned = bkm::tune_lambda(t, sched, trial);
    const auto p = bkm::build_qubo(t, tuned.lambda);
    BitVec best;
    double best_energy = std::numeric_limits<double>::infinity();
    for (std::uint64_t mask = 0; mask < (1ULL << t.num_vars()); ++mask) {
      BitVec z(t.num_vars());
      for (int i = 0; i < t.num_vars(); ++i) z[i] = (mask >> i) & 1 ? 1 : 0;
      const double e = bkm::qubo_energy(p, z);
      if (e < best_energy) {
        best_energy = e;
        best = z;
      }
    }
    const auto a = bkm::try_devectorize(best, t);
    REQUIRE(a.has_value());
    CHECK(bkm::is_feasible(*a, t));
  }
}
