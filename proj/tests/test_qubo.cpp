#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "bkm/lagrange.hpp"
#include "bkm/qubo.hpp"
#include "test_util.hpp"

using bkm::Assignment;
using bkm::BitVec;
using test_util::make_task;

namespace {

// Oracle: brute force over all 2^n binary vectors.
BitVec brute_force_argmin(const bkm::QuboProblem& p) {
  const int n = p.n();
  BitVec best;
  double best_energy = 0.0;
  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    BitVec z(n);
    for (int i = 0; i < n; ++i) z[i] = (mask >> i) & 1 ? 1 : 0;
    const double e = bkm::qubo_energy(p, z);
    if (best.empty() || e < best_energy) {
      best = z;
      best_energy = e;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("constraint system matches the matrix form") {
  auto t = make_task({{0, 0}, {1, 0}}, {1, 1});
  const auto cs = bkm::build_constraints(t);
  Eigen::MatrixXd expected(4, 4);
  expected << 1, 0, 1, 0,  //
      0, 1, 0, 1,          //
      1, 1, 0, 0,          //
      0, 0, 1, 1;
  CHECK(cs.dense() == expected);
  Eigen::VectorXd d(4);
  d << 1, 1, 1, 1;
  CHECK(cs.d == d);
  CHECK(cs.nonzeros() == 2 * t.num_vars());
}

TEST_CASE("constraint system with a single cluster") {
  auto t = make_task({{0}, {1}}, {2});
  const auto cs = bkm::build_constraints(t);
  Eigen::MatrixXd expected(3, 2);
  expected << 1, 0,  //
      0, 1,          //
      1, 1;
  CHECK(cs.dense() == expected);
  Eigen::VectorXd d(3);
  d << 1, 1, 2;
  CHECK(cs.d == d);
}

TEST_CASE("G z = d exactly for every feasible labeling") {
  auto t = test_util::random_task({2, 2, 2}, 2, 21);
  const auto cs = bkm::build_constraints(t);
  const auto labelings = test_util::all_feasible_labelings(t);
  REQUIRE(labelings.size() == 90);
  for (const auto& labels : labelings) {
    const BitVec z = bkm::vectorize(Assignment(labels), t);
    CHECK(cs.residual(z).lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("data costs vanish for coincident points") {
  auto t = make_task({{1.5, -2.0}, {1.5, -2.0}}, {2});
  const auto q = bkm::build_data_costs(t);
  const BitVec z = bkm::vectorize(Assignment({0, 0}), t);
  Eigen::VectorXd zv(2);
  zv << 1, 1;
  CHECK(zv.transpose() * q * zv == 0.0);
}

TEST_CASE("data costs reproduce the centroid energy on a pair") {
  // Points (0,0) and (2,0) in one cluster: mean (1,0), energy 1/2 (1+1) = 1.
  auto t = make_task({{0, 0}, {2, 0}}, {2});
  const auto q = bkm::build_data_costs(t);
  Eigen::VectorXd zv(2);
  zv << 1, 1;
  const double quad = zv.transpose() * q * zv;
  CHECK(quad == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(quad ==
        doctest::Approx(test_util::centroid_energy(t, {0, 0})).epsilon(1e-12));
}

TEST_CASE("data costs equal the centroid oracle over all partitions") {
  auto t = test_util::random_task({3, 3, 3}, 2, 33);
  const auto q = bkm::build_data_costs(t);
  const auto labelings = test_util::all_feasible_labelings(t);
  REQUIRE(labelings.size() == 1680);  // 9! / (3!)^3
  for (const auto& labels : labelings) {
    const BitVec z = bkm::vectorize(Assignment(labels), t);
    Eigen::VectorXd zv(t.num_vars());
    for (int i = 0; i < t.num_vars(); ++i) zv(i) = z[i];
    const double quad = zv.transpose() * q * zv;
    CHECK(quad == doctest::Approx(test_util::centroid_energy(t, labels))
                      .epsilon(1e-9));
  }
}

TEST_CASE("penalty vanishes on feasible vectors for any lambda") {
  auto t = test_util::random_task({2, 2}, 2, 5);
  const auto q = bkm::build_data_costs(t);
  for (double lambda : {0.5, 3.0, 250.0}) {
    const auto p = bkm::build_qubo(t, lambda);
    for (const auto& labels : test_util::all_feasible_labelings(t)) {
      const BitVec z = bkm::vectorize(Assignment(labels), t);
      Eigen::VectorXd zv(t.num_vars());
      for (int i = 0; i < t.num_vars(); ++i) zv(i) = z[i];
      const double data_only = zv.transpose() * q * zv;
      CHECK(bkm::qubo_energy(p, z) == doctest::Approx(data_only).epsilon(1e-10));
    }
  }
}

TEST_CASE("all-zeros vector pays the full constant offset") {
  auto t = make_task({{0, 0}, {1, 1}, {2, 0}, {0, 2}}, {2, 2});
  const double lambda = 7.5;
  const auto p = bkm::build_qubo(t, lambda);
  const BitVec zeros(t.num_vars(), 0);
  // lambda * (I + sum s_k^2) = 7.5 * (4 + 8)
  CHECK(bkm::qubo_energy(p, zeros) == doctest::Approx(lambda * 12.0));
}

TEST_CASE("penalty of any infeasible vector is at least lambda") {
  auto t = test_util::random_task({2, 1}, 2, 9);
  const double lambda = 2.25;
  const auto p = bkm::build_qubo(t, lambda);
  const auto q = bkm::build_data_costs(t);
  const auto cs = bkm::build_constraints(t);
  bkm::Rng rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    BitVec z(t.num_vars());
    for (auto& bit : z) bit = rng.bernoulli(0.5) ? 1 : 0;
    if (cs.residual(z).lpNorm<Eigen::Infinity>() == 0.0) continue;
    Eigen::VectorXd zv(t.num_vars());
    for (int i = 0; i < t.num_vars(); ++i) zv(i) = z[i];
    const double data_only = zv.transpose() * q * zv;
    const double penalty = bkm::qubo_energy(p, z) - data_only;
    CHECK(penalty >= lambda - 1e-9);
  }
}

TEST_CASE("lambda <= 0 is rejected") {
  auto t = make_task({{0}, {1}}, {1, 1});
  CHECK_THROWS_AS(bkm::build_qubo(t, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(bkm::build_qubo(t, -1.0), std::invalid_argument);
}

TEST_CASE("unconstrained argmin matches the constrained one above the bound") {
  // K=2, I=4: brute force over all 256 binary vectors.
  auto t = test_util::random_task({2, 2}, 2, 77);
  const auto seed_labels = test_util::all_feasible_labelings(t).front();
  const double bound = bkm::lambda_lower_bound(t, Assignment(seed_labels));
  const auto p = bkm::build_qubo(t, 2.0 * bound + 1.0);
  const BitVec best = brute_force_argmin(p);

  // Constrained argmin via the labeling oracle.
  double best_feasible = std::numeric_limits<double>::infinity();
  BitVec best_feasible_z;
  for (const auto& labels : test_util::all_feasible_labelings(t)) {
    const BitVec z = bkm::vectorize(Assignment(labels), t);
    const double e = bkm::qubo_energy(p, z);
    if (e < best_feasible) {
      best_feasible = e;
      best_feasible_z = z;
    }
  }
  CHECK(best == best_feasible_z);
}

TEST_CASE("ising translation: single variable") {
  bkm::QuboProblem p;
  p.q = Eigen::MatrixXd::Constant(1, 1, 0.7);
  p.b = Eigen::VectorXd::Constant(1, -1.3);
  p.offset = 0.4;
  const auto m = bkm::qubo_to_ising(p);
  for (int spin : {-1, 1}) {
    const BitVec z{spin > 0 ? std::uint8_t{1} : std::uint8_t{0}};
    CHECK(bkm::ising_energy(m, {spin}) ==
          doctest::Approx(bkm::qubo_energy(p, z)).epsilon(1e-12));
  }
}

TEST_CASE("ising translation: zero problem") {
  bkm::QuboProblem p;
  p.q = Eigen::MatrixXd::Zero(3, 3);
  p.b = Eigen::VectorXd::Zero(3);
  const auto m = bkm::qubo_to_ising(p);
  CHECK(m.j.isZero(0.0));
  CHECK(m.h.isZero(0.0));
  CHECK(m.constant == 0.0);
}

TEST_CASE("ising translation: exhaustive equality on 8 variables") {
  bkm::Rng rng(123);
  bkm::QuboProblem p;
  const int n = 8;
  p.q = Eigen::MatrixXd::Zero(n, n);
  p.b = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    p.b(i) = rng.uniform(-2, 2);
    p.q(i, i) = rng.uniform(-2, 2);
    for (int j = i + 1; j < n; ++j) {
      const double v = rng.uniform(-1, 1);
      p.q(i, j) = v;
      p.q(j, i) = v;
    }
  }
  p.offset = rng.uniform(-1, 1);
  const auto m = bkm::qubo_to_ising(p);
  for (int mask = 0; mask < (1 << n); ++mask) {
    BitVec z(n);
    std::vector<int> spins(n);
    for (int i = 0; i < n; ++i) {
      z[i] = (mask >> i) & 1 ? 1 : 0;
      spins[i] = z[i] ? 1 : -1;
    }
    CHECK(bkm::ising_energy(m, spins) ==
          doctest::Approx(bkm::qubo_energy(p, z)).epsilon(1e-10));
  }
}

TEST_CASE("qubo json round trip preserves energies") {
  auto t = test_util::random_task({2, 2, 1}, 2, 55);
  const auto p = bkm::build_qubo(t, 3.7);
  const auto p2 = bkm::qubo_from_json(bkm::qubo_to_json(p));
  bkm::Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    BitVec z(t.num_vars());
    for (auto& bit : z) bit = rng.bernoulli(0.5) ? 1 : 0;
    CHECK(bkm::qubo_energy(p2, z) ==
          doctest::Approx(bkm::qubo_energy(p, z)).epsilon(1e-10));
  }
}
