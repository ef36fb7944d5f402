#include "bkm/maxset.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "bkm/hungarian.hpp"

namespace bkm {

namespace {

// Agreement counts over masked points: agree(c, c') = |{i : a_i = c, ref_i = c'}|.
Eigen::MatrixXi agreement_matrix(const Assignment& a, const Assignment& ref,
                                 int k, const std::vector<std::uint8_t>& mask) {
  Eigen::MatrixXi m = Eigen::MatrixXi::Zero(k, k);
  for (std::size_t i = 0; i < a.labels.size(); ++i) {
    if (!mask[i]) continue;
    m(a.labels[i], ref.labels[i]) += 1;
  }
  return m;
}

}  // namespace

AlignResult align_masked(const Assignment& a, const Assignment& ref, int k,
                         const std::vector<std::uint8_t>& mask) {
  if (a.labels.size() != ref.labels.size() || mask.size() != a.labels.size())
    throw std::invalid_argument("align: assignments must cover the same points");
  for (int l : a.labels) {
    if (l < 0 || l >= k) throw std::invalid_argument("align: label out of range");
  }
  for (int l : ref.labels) {
    if (l < 0 || l >= k) throw std::invalid_argument("align: label out of range");
  }
  const Eigen::MatrixXi agree = agreement_matrix(a, ref, k, mask);
  int masked_total = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) masked_total += mask[i] ? 1 : 0;

  AlignResult best;
  if (k <= 8) {
    // All K! candidates in lexicographic order; first optimum wins the tie.
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    int best_agree = -1;
    do {
      int total = 0;
      for (int c = 0; c < k; ++c) total += agree(c, perm[c]);
      if (total > best_agree) {
        best_agree = total;
        best.perm = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    best.disagreements = masked_total - best_agree;
  } else {
    const Eigen::MatrixXd cost = -agree.cast<double>();
    best.perm = hungarian(cost);
    int total = 0;
    for (int c = 0; c < k; ++c) total += agree(c, best.perm[c]);
    best.disagreements = masked_total - total;
  }
  return best;
}

AlignResult align(const Assignment& a, const Assignment& ref, int k) {
  return align_masked(a, ref, k, std::vector<std::uint8_t>(a.labels.size(), 1));
}

int MaxsetResult::retained_count() const {
  int n = 0;
  for (auto r : retained) n += r ? 1 : 0;
  return n;
}

MaxsetResult maxset_search(const PosteriorTable& pt, double p_min) {
  if (pt.rows.empty())
    throw std::invalid_argument("maxset_search: empty posterior table");
  if (!(p_min > 0.0) || p_min > 1.0)
    throw std::invalid_argument("maxset_search: p_min must be in (0, 1]");
  const int n_points = static_cast<int>(pt.rows.front().partition.labels.size());
  int k = 0;
  for (const auto& row : pt.rows) {
    for (int l : row.partition.labels) k = std::max(k, l + 1);
  }

  MaxsetResult result;
  result.retained.assign(n_points, 1);
  result.consensus = pt.rows.front().partition.labels;
  result.accumulated_p = pt.rows.front().probability;
  result.trace.push_back({0, {}, {}, result.accumulated_p});

  const Assignment consensus_ref(result.consensus);
  std::size_t i = 1;
  while (result.accumulated_p < p_min && i < pt.rows.size()) {
    const Assignment candidate(pt.rows[i].partition.labels);
    const AlignResult aligned =
        align_masked(candidate, consensus_ref, k, result.retained);
    MaxsetStep step;
    step.solution_index = static_cast<int>(i);
    for (int point = 0; point < n_points; ++point) {
      if (!result.retained[point]) continue;
      if (aligned.perm[candidate.labels[point]] != result.consensus[point]) {
        result.retained[point] = 0;
        step.removed_points.push_back(point);
      }
    }
    result.accumulated_p += pt.rows[i].probability;
    step.accumulated_p = result.accumulated_p;
    // Consensus clusters that no longer hold any retained point.
    std::vector<int> retained_per_cluster(k, 0);
    for (int point = 0; point < n_points; ++point) {
      if (result.retained[point]) ++retained_per_cluster[result.consensus[point]];
    }
    for (int c = 0; c < k; ++c) {
      if (retained_per_cluster[c] == 0) step.emptied_clusters.push_back(c);
    }
    result.trace.push_back(std::move(step));
    ++i;
  }
  result.reached_pmin = result.accumulated_p >= p_min;
  return result;
}

nlohmann::ordered_json maxset_to_json(const MaxsetResult& r) {
  nlohmann::ordered_json j;
  std::vector<int> mask(r.retained.begin(), r.retained.end());
  j["retained"] = mask;
  j["consensus"] = r.consensus;
  j["accumulated_p"] = r.accumulated_p;
  j["reached_pmin"] = r.reached_pmin;
  auto trace = nlohmann::ordered_json::array();
  for (const auto& step : r.trace) {
    trace.push_back({{"solution_index", step.solution_index},
                     {"removed_points", step.removed_points},
                     {"emptied_clusters", step.emptied_clusters},
                     {"accumulated_p", step.accumulated_p}});
  }
  j["trace"] = std::move(trace);
  return j;
}

MaxsetResult maxset_from_json(const nlohmann::json& j) {
  MaxsetResult r;
  const auto mask = j.at("retained").get<std::vector<int>>();
  r.retained.assign(mask.begin(), mask.end());
  r.consensus = j.at("consensus").get<std::vector<int>>();
  r.accumulated_p = j.at("accumulated_p").get<double>();
  r.reached_pmin = j.at("reached_pmin").get<bool>();
  for (const auto& sj : j.at("trace")) {
    MaxsetStep step;
    step.solution_index = sj.at("solution_index").get<int>();
    step.removed_points = sj.at("removed_points").get<std::vector<int>>();
    step.emptied_clusters = sj.at("emptied_clusters").get<std::vector<int>>();
    step.accumulated_p = sj.at("accumulated_p").get<double>();
    r.trace.push_back(std::move(step));
  }
  return r;
}

}  // namespace bkm
