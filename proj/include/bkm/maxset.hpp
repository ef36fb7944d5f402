#pragma once
// Greedy maximum-pointset extraction: intersect the top posterior solutions,
// dropping points they disagree on, until the accumulated probability of the
// merged solutions reaches p_min.
#include <cstdint>
#include <utility>
#include <vector>

#include "json.hpp"

#include "bkm/posterior.hpp"
#include "bkm/task.hpp"

namespace bkm {

struct AlignResult {
  std::vector<int> perm;  // relabeling of `a`: new label = perm[old label]
  int disagreements = 0;
};

/// Cluster relabeling of `a` minimizing the points on which it disagrees with
/// `ref`, solved exactly. Ties break to the lexicographically smallest
/// permutation (guaranteed for K <= 8, where all K! candidates are scanned;
/// larger K falls back to an optimal assignment solver).
AlignResult align(const Assignment& a, const Assignment& ref, int k);

/// As above, counting disagreements over masked points only.
AlignResult align_masked(const Assignment& a, const Assignment& ref, int k,
                         const std::vector<std::uint8_t>& mask);

struct MaxsetStep {
  int solution_index = 0;              // row merged at this step
  std::vector<int> removed_points = {};
  std::vector<int> emptied_clusters = {};  // clusters left without retained points
  double accumulated_p = 0.0;
};

struct MaxsetResult {
  std::vector<std::uint8_t> retained;  // mask over points
  std::vector<int> consensus;          // labels, meaningful where retained
  double accumulated_p = 0.0;
  bool reached_pmin = false;           // false when the table ran out first
  std::vector<MaxsetStep> trace;

  int retained_count() const;
};

/// Runs the greedy search on a posterior table. p_min must lie in (0, 1].
MaxsetResult maxset_search(const PosteriorTable& pt, double p_min);

nlohmann::ordered_json maxset_to_json(const MaxsetResult& r);
MaxsetResult maxset_from_json(const nlohmann::json& j);

}  // namespace bkm
