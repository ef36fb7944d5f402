#include "bkm/qubo.hpp"

#include <stdexcept>

namespace bkm {

Eigen::VectorXd ConstraintSystem::residual(const BitVec& z) const {
  if (static_cast<int>(z.size()) != num_cols)
    throw std::invalid_argument("residual: vector length != K*I");
  Eigen::VectorXd r = -d;
  for (int row = 0; row < num_rows; ++row) {
    for (int col : row_cols[row]) r(row) += z[col] ? 1.0 : 0.0;
  }
  return r;
}

Eigen::MatrixXd ConstraintSystem::dense() const {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(num_rows, num_cols);
  for (int row = 0; row < num_rows; ++row) {
    for (int col : row_cols[row]) g(row, col) = 1.0;
  }
  return g;
}

std::int64_t ConstraintSystem::nonzeros() const {
  std::int64_t n = 0;
  for (const auto& cols : row_cols) n += static_cast<std::int64_t>(cols.size());
  return n;
}

ConstraintSystem build_constraints(const ClusteringTask& t) {
  t.validate();
  const int n_points = t.num_points();
  ConstraintSystem cs;
  cs.num_rows = n_points + t.k;
  cs.num_cols = t.num_vars();
  cs.row_cols.resize(cs.num_rows);
  cs.d.resize(cs.num_rows);
  for (int i = 0; i < n_points; ++i) {
    cs.row_cols[i].reserve(t.k);
    for (int k = 0; k < t.k; ++k) cs.row_cols[i].push_back(k * n_points + i);
    cs.d(i) = 1.0;
  }
  for (int k = 0; k < t.k; ++k) {
    auto& cols = cs.row_cols[n_points + k];
    cols.reserve(n_points);
    for (int i = 0; i < n_points; ++i) cols.push_back(k * n_points + i);
    cs.d(n_points + k) = static_cast<double>(t.sizes[k]);
  }
  return cs;
}

Eigen::MatrixXd build_data_costs(const ClusteringTask& t) {
  t.validate();
  const int n_points = t.num_points();
  const int n = t.num_vars();
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < t.k; ++k) {
    const double scale = 1.0 / (4.0 * t.sizes[k]);
    const int base = k * n_points;
    for (int i = 0; i < n_points; ++i) {
      for (int j = i + 1; j < n_points; ++j) {
        const double dist2 = (t.points.row(i) - t.points.row(j)).squaredNorm();
        const double value = dist2 * scale;
        q(base + i, base + j) = value;
        q(base + j, base + i) = value;
      }
    }
  }
  return q;
}

QuboProblem build_qubo(const ClusteringTask& t, double lambda) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("build_qubo: lambda must be > 0");
  const ConstraintSystem cs = build_constraints(t);
  QuboProblem p;
  p.lambda = lambda;
  p.q = build_data_costs(t);
  p.b = Eigen::VectorXd::Zero(cs.num_cols);
  p.offset = lambda * cs.d.squaredNorm();
  // G^T G and G^T d accumulated row by row; G rows are short.
  for (int row = 0; row < cs.num_rows; ++row) {
    const auto& cols = cs.row_cols[row];
    for (int a : cols) {
      p.b(a) += -2.0 * lambda * cs.d(row);
      for (int b : cols) p.q(a, b) += lambda;
    }
  }
  return p;
}

double qubo_energy(const QuboProblem& p, const BitVec& z) {
  if (static_cast<int>(z.size()) != p.n())
    throw std::invalid_argument("qubo_energy: vector length != problem size");
  // Iterate the support only; feasible vectors have exactly I ones.
  std::vector<int> ones;
  ones.reserve(z.size());
  for (int i = 0; i < p.n(); ++i) {
    if (z[i]) ones.push_back(i);
  }
  double e = p.offset;
  for (std::size_t a = 0; a < ones.size(); ++a) {
    const int i = ones[a];
    e += p.q(i, i) + p.b(i);
    for (std::size_t bx = a + 1; bx < ones.size(); ++bx) {
      e += 2.0 * p.q(i, ones[bx]);
    }
  }
  return e;
}

IsingModel qubo_to_ising(const QuboProblem& p) {
  IsingModel m;
  m.j = -0.25 * p.q;
  m.j.diagonal().setZero();
  const Eigen::VectorXd row_sums = p.q.rowwise().sum();
  m.h = -0.5 * (row_sums + p.b);
  m.constant = 0.25 * p.q.sum() + 0.25 * p.q.trace() + 0.5 * p.b.sum() +
               p.offset;
  return m;
}

double ising_energy(const IsingModel& m, const std::vector<int>& spins) {
  if (static_cast<int>(spins.size()) != m.n())
    throw std::invalid_argument("ising_energy: spin count != model size");
  double e = m.constant;
  for (int i = 0; i < m.n(); ++i) {
    e -= m.h(i) * spins[i];
    for (int j = 0; j < m.n(); ++j) e -= m.j(i, j) * spins[i] * spins[j];
  }
  return e;
}

nlohmann::ordered_json qubo_to_json(const QuboProblem& p) {
  nlohmann::ordered_json j;
  j["n"] = p.n();
  j["lambda"] = p.lambda;
  j["offset"] = p.offset;
  std::vector<double> linear(p.n());
  for (int i = 0; i < p.n(); ++i) linear[i] = p.q(i, i) + p.b(i);
  j["linear"] = linear;
  auto quad = nlohmann::ordered_json::array();
  for (int i = 0; i < p.n(); ++i) {
    for (int k = i + 1; k < p.n(); ++k) {
      const double v = p.q(i, k) + p.q(k, i);
      if (v != 0.0) quad.push_back({i, k, v});
    }
  }
  j["quadratic"] = std::move(quad);
  return j;
}

QuboProblem qubo_from_json(const nlohmann::json& j) {
  QuboProblem p;
  const int n = j.at("n").get<int>();
  p.lambda = j.at("lambda").get<double>();
  p.offset = j.at("offset").get<double>();
  p.q = Eigen::MatrixXd::Zero(n, n);
  p.b = Eigen::VectorXd::Zero(n);
  const auto& linear = j.at("linear");
  if (static_cast<int>(linear.size()) != n)
    throw std::invalid_argument("qubo_from_json: linear length != n");
  for (int i = 0; i < n; ++i) p.b(i) = linear[i].get<double>();
  for (const auto& term : j.at("quadratic")) {
    const int a = term.at(0).get<int>();
    const int bx = term.at(1).get<int>();
    if (a < 0 || bx <= a || bx >= n)
      throw std::invalid_argument("qubo_from_json: bad quadratic index pair");
    const double v = term.at(2).get<double>() / 2.0;
    p.q(a, bx) = v;
    p.q(bx, a) = v;
  }
  return p;
}

}  // namespace bkm
