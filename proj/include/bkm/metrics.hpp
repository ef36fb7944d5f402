#pragma once
// Clustering quality metrics, probability calibration reports, and
// sparsification curves.
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "bkm/task.hpp"

namespace bkm {

/// 1 iff prediction and ground truth induce the same partition.
int accuracy(const Assignment& pred, const std::vector<int>& gt);

/// Rosenberg-Hirschberg completeness, 1 - H(pred|gt) / H(pred); defined as 1
/// when H(pred) = 0.
double completeness(const Assignment& pred, const std::vector<int>& gt);

/// Hubert-Arabie adjusted Rand index.
double adjusted_rand(const Assignment& pred, const std::vector<int>& gt);

/// Fowlkes-Mallows score, TP / sqrt((TP+FP)(TP+FN)) over point pairs.
double fowlkes_mallows(const Assignment& pred, const std::vector<int>& gt);

struct CalibrationBin {
  double lower = 0.0;
  double upper = 0.0;
  std::int64_t n_solutions = 0;
  double mean_predicted_p = 0.0;
  double empirical_correct_fraction = 0.0;
};

struct CalibrationReport {
  std::vector<CalibrationBin> bins;
  double ece = 0.0;  // count-weighted |mean predicted - empirical|
  std::int64_t total = 0;
};

/// Streaming accumulator over (predicted probability, correct) pairs. Bin
/// counts are exact, so accumulators can be merged across tasks and re-binned
/// to any coarser width that divides fine_bins.
class CalibrationAccumulator {
 public:
  explicit CalibrationAccumulator(int fine_bins = 100);

  void add(double p, bool correct);
  void merge(const CalibrationAccumulator& other);
  CalibrationReport report(int n_bins = 10) const;

  int fine_bins() const { return static_cast<int>(n_.size()); }
  std::int64_t total() const;

  nlohmann::ordered_json to_json() const;
  static CalibrationAccumulator from_json(const nlohmann::json& j);

 private:
  std::vector<std::int64_t> n_;
  std::vector<double> sum_p_;
  std::vector<std::int64_t> n_correct_;
};

/// Equal-width bins over [0, 1]; p = 1 lands in the last bin. Throws
/// std::invalid_argument on empty input.
CalibrationReport calibration_report(
    const std::vector<std::pair<double, bool>>& solutions, int n_bins = 10);

struct SparsificationInput {
  double predicted_p = 0.0;
  double metric_value = 0.0;
  std::string task_id;  // tie-break for deterministic ordering
};

struct SparsificationCurve {
  std::vector<double> fractions_removed;
  std::vector<double> metric_predicted;  // remove by ascending predicted p
  std::vector<double> metric_oracle;     // remove by ascending metric value
};

/// Mean metric over the remaining tasks after removing floor(f * N) tasks at
/// each grid fraction f; every fraction must leave at least one task.
SparsificationCurve sparsification(const std::vector<SparsificationInput>& tasks,
                                   const std::vector<double>& grid);

nlohmann::ordered_json calibration_to_json(const CalibrationReport& r);
nlohmann::ordered_json sparsification_to_json(const SparsificationCurve& c);
SparsificationCurve sparsification_from_json(const nlohmann::json& j);

}  // namespace bkm
