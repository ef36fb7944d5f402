#include "bkm/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace bkm {

namespace {

// Energy of a partition given by any label vector over the task's points.
// Unlike exact_energy this does not check sizes: partition keys of tasks with
// unequal cluster sizes are valid partitions but not size-consistent labelings.
double partition_energy(const ClusteringTask& t, const std::vector<int>& labels) {
  int n_clusters = 0;
  for (int l : labels) n_clusters = std::max(n_clusters, l + 1);
  const int dim = t.dim();
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(n_clusters, dim);
  std::vector<int> counts(n_clusters, 0);
  for (int i = 0; i < t.num_points(); ++i) {
    means.row(labels[i]) += t.points.row(i);
    ++counts[labels[i]];
  }
  for (int c = 0; c < n_clusters; ++c) {
    if (counts[c] > 0) means.row(c) /= static_cast<double>(counts[c]);
  }
  double energy = 0.0;
  for (int i = 0; i < t.num_points(); ++i) {
    energy += 0.5 * (t.points.row(i) - means.row(labels[i])).squaredNorm();
  }
  return energy;
}

}  // namespace

double exact_energy(const ClusteringTask& t, const Assignment& a) {
  if (!is_feasible(a, t))
    throw std::invalid_argument("exact_energy: assignment is infeasible");
  return partition_energy(t, a.labels);
}

double feasible_fraction(const SampleSet& s, const ClusteringTask& t) {
  std::int64_t total = 0;
  std::int64_t feasible = 0;
  for (const auto& e : s.entries) {
    total += e.count;
    const auto a = try_devectorize(e.z, t);
    if (a && is_feasible(*a, t)) feasible += e.count;
  }
  return total > 0 ? static_cast<double>(feasible) / total : 0.0;
}

PosteriorTable reparametrize(const SampleSet& s, const ClusteringTask& t) {
  if (s.entries.empty())
    throw std::invalid_argument("reparametrize: empty sample set");
  std::int64_t total = 0;
  std::int64_t feasible_total = 0;
  std::map<PartitionKey, std::int64_t> observed;
  for (const auto& e : s.entries) {
    total += e.count;
    const auto a = try_devectorize(e.z, t);
    if (!a || !is_feasible(*a, t)) continue;
    feasible_total += e.count;
    observed[canonicalize(*a)] += e.count;
  }
  if (observed.empty())
    throw empty_posterior_error(
        "reparametrize: no feasible entry in the sample set");

  PosteriorTable pt;
  pt.feasible_fraction = static_cast<double>(feasible_total) / total;
  pt.rows.reserve(observed.size());
  for (const auto& [key, count] : observed) {
    PosteriorRow row;
    row.partition = key;
    row.energy = partition_energy(t, key.labels);
    row.observed_count = count;
    pt.rows.push_back(std::move(row));
  }
  // exp(-E) normalized, keyed off the minimum energy for stability. Observed
  // counts deliberately do not enter the probabilities.
  double e_min = pt.rows.front().energy;
  for (const auto& row : pt.rows) e_min = std::min(e_min, row.energy);
  double norm = 0.0;
  for (auto& row : pt.rows) {
    row.probability = std::exp(-(row.energy - e_min));
    norm += row.probability;
  }
  for (auto& row : pt.rows) row.probability /= norm;
  std::sort(pt.rows.begin(), pt.rows.end(),
            [](const PosteriorRow& a, const PosteriorRow& b) {
              if (a.energy != b.energy) return a.energy < b.energy;
              return a.partition < b.partition;
            });
  return pt;
}

PosteriorTable exact_posterior(const ClusteringTask& t, std::uint64_t cap) {
  // Any positive lambda gives identical feasible energies; the enumerator
  // never visits infeasible states.
  const QuboProblem p = build_qubo(t, 1.0);
  return reparametrize(enumerate_exhaustive(t, p, cap), t);
}

std::pair<PartitionKey, double> map_solution(const PosteriorTable& pt) {
  if (pt.rows.empty())
    throw std::invalid_argument("map_solution: empty posterior table");
  return {pt.rows.front().partition, pt.rows.front().probability};
}

nlohmann::ordered_json posterior_to_json(const PosteriorTable& pt) {
  nlohmann::ordered_json j;
  j["feasible_fraction"] = pt.feasible_fraction;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : pt.rows) {
    rows.push_back({{"partition", row.partition.labels},
                    {"energy", row.energy},
                    {"probability", row.probability},
                    {"count", row.observed_count}});
  }
  j["rows"] = std::move(rows);
  return j;
}

PosteriorTable posterior_from_json(const nlohmann::json& j) {
  PosteriorTable pt;
  pt.feasible_fraction = j.at("feasible_fraction").get<double>();
  for (const auto& rj : j.at("rows")) {
    PosteriorRow row;
    row.partition.labels = rj.at("partition").get<std::vector<int>>();
    row.energy = rj.at("energy").get<double>();
    row.probability = rj.at("probability").get<double>();
    row.observed_count = rj.at("count").get<std::int64_t>();
    pt.rows.push_back(std::move(row));
  }
  return pt;
}

}  // namespace bkm
