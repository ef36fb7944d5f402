#pragma once
// Penalized QUBO construction for balanced clustering.
//
// The constrained problem  min_z z^T Q z  s.t.  G z = d  becomes the
// unconstrained  min_z z^T Q' z + b'^T z + offset  with
//   Q' = Q + lambda G^T G,  b' = -2 lambda G^T d,  offset = lambda d^T d.
// For feasible z the penalty vanishes exactly, so the reported energy of a
// feasible solution is its data energy with no post-hoc correction.
#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "json.hpp"

#include "bkm/task.hpp"

namespace bkm {

struct ConstraintSystem {
  // Row r < I: point r belongs to exactly one cluster (sum over k of
  // z[k*I + r] = 1). Row I + k: cluster k holds sizes[k] points. Stored
  // row-sparse; 2*K*I nonzeros total.
  int num_rows = 0;  // I + K
  int num_cols = 0;  // K * I
  std::vector<std::vector<int>> row_cols;
  Eigen::VectorXd d;

  Eigen::VectorXd residual(const BitVec& z) const;  // G z - d
  Eigen::MatrixXd dense() const;
  std::int64_t nonzeros() const;
};

struct QuboProblem {
  Eigen::MatrixXd q;     // symmetric Q' = Q + lambda G^T G
  Eigen::VectorXd b;     // b' = -2 lambda G^T d
  double offset = 0.0;   // lambda d^T d
  double lambda = 0.0;

  int n() const { return static_cast<int>(b.size()); }
};

ConstraintSystem build_constraints(const ClusteringTask& t);

/// Block-diagonal pairwise data costs. Entries are scaled so that for every
/// feasible z,  z^T Q z = sum_k 1/2 sum_{i in cluster k} |x_i - mean_k|^2
/// (the exact Gaussian energy with maximum-likelihood means): off-diagonal
/// entries |x_i - x_j|^2 / (4 s_k), zero diagonal, each unordered pair
/// counted twice by the quadratic form.
Eigen::MatrixXd build_data_costs(const ClusteringTask& t);

/// Throws std::invalid_argument for lambda <= 0.
QuboProblem build_qubo(const ClusteringTask& t, double lambda);

/// z^T q z + b^T z + offset.
double qubo_energy(const QuboProblem& p, const BitVec& z);

/// Energy change of flipping bit i, given the field g = q * z.
inline double qubo_flip_delta(const QuboProblem& p, const BitVec& z,
                              const Eigen::VectorXd& g, int i) {
  const double sign = z[i] ? -1.0 : 1.0;
  return p.q(i, i) + sign * (p.b(i) + 2.0 * g(i));
}

struct IsingModel {
  Eigen::MatrixXd j;   // symmetric couplings, zero diagonal
  Eigen::VectorXd h;   // fields
  double constant = 0.0;

  int n() const { return static_cast<int>(h.size()); }
};

/// Substitutes z_i = (1 + sigma_i) / 2 so that for every state,
/// ising_energy(sigma) == qubo_energy(z).
IsingModel qubo_to_ising(const QuboProblem& p);

/// -sigma^T J sigma - h^T sigma + constant, spins in {-1, +1}.
double ising_energy(const IsingModel& m, const std::vector<int>& spins);

/// Export format for external sampler services:
/// {"n", "lambda", "offset", "linear", "quadratic": [[i, j, value], ...]}
/// with i < j, linear folding the matrix diagonal (z_i^2 = z_i).
nlohmann::ordered_json qubo_to_json(const QuboProblem& p);
QuboProblem qubo_from_json(const nlohmann::json& j);

}  // namespace bkm
