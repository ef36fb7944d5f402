#include "bkm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bkm {

namespace {

void check_pair(const Assignment& pred, const std::vector<int>& gt) {
  if (gt.empty()) throw std::invalid_argument("metric: ground truth missing");
  if (pred.labels.size() != gt.size())
    throw std::invalid_argument("metric: label vectors differ in length");
}

struct Contingency {
  std::vector<std::vector<std::int64_t>> counts;  // pred cluster x gt cluster
  std::vector<std::int64_t> pred_sizes;
  std::vector<std::int64_t> gt_sizes;
  std::int64_t n = 0;
};

Contingency contingency(const Assignment& pred, const std::vector<int>& gt) {
  check_pair(pred, gt);
  int kp = 0, kg = 0;
  for (int l : pred.labels) kp = std::max(kp, l + 1);
  for (int l : gt) kg = std::max(kg, l + 1);
  Contingency c;
  c.counts.assign(kp, std::vector<std::int64_t>(kg, 0));
  c.pred_sizes.assign(kp, 0);
  c.gt_sizes.assign(kg, 0);
  c.n = static_cast<std::int64_t>(gt.size());
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (pred.labels[i] < 0 || gt[i] < 0)
      throw std::invalid_argument("metric: negative label");
    c.counts[pred.labels[i]][gt[i]] += 1;
    c.pred_sizes[pred.labels[i]] += 1;
    c.gt_sizes[gt[i]] += 1;
  }
  return c;
}

double choose2(std::int64_t n) { return 0.5 * static_cast<double>(n) * (n - 1); }

}  // namespace

int accuracy(const Assignment& pred, const std::vector<int>& gt) {
  check_pair(pred, gt);
  return canonicalize(pred) == canonicalize(Assignment(gt)) ? 1 : 0;
}

double completeness(const Assignment& pred, const std::vector<int>& gt) {
  const Contingency c = contingency(pred, gt);
  const double n = static_cast<double>(c.n);
  double h_pred = 0.0;
  for (std::int64_t s : c.pred_sizes) {
    if (s > 0) h_pred -= (s / n) * std::log(s / n);
  }
  if (h_pred == 0.0) return 1.0;
  double h_pred_given_gt = 0.0;
  for (std::size_t p = 0; p < c.counts.size(); ++p) {
    for (std::size_t g = 0; g < c.counts[p].size(); ++g) {
      const std::int64_t joint = c.counts[p][g];
      if (joint == 0) continue;
      h_pred_given_gt -=
          (joint / n) * std::log(static_cast<double>(joint) / c.gt_sizes[g]);
    }
  }
  return 1.0 - h_pred_given_gt / h_pred;
}

double adjusted_rand(const Assignment& pred, const std::vector<int>& gt) {
  const Contingency c = contingency(pred, gt);
  double index = 0.0;
  for (const auto& row : c.counts) {
    for (std::int64_t joint : row) index += choose2(joint);
  }
  double sum_pred = 0.0, sum_gt = 0.0;
  for (std::int64_t s : c.pred_sizes) sum_pred += choose2(s);
  for (std::int64_t s : c.gt_sizes) sum_gt += choose2(s);
  const double total = choose2(c.n);
  const double expected = total > 0.0 ? sum_pred * sum_gt / total : 0.0;
  const double max_index = 0.5 * (sum_pred + sum_gt);
  const double denom = max_index - expected;
  if (std::abs(denom) < 1e-12) return 1.0;  // both partitions trivial
  return (index - expected) / denom;
}

double fowlkes_mallows(const Assignment& pred, const std::vector<int>& gt) {
  const Contingency c = contingency(pred, gt);
  double tp = 0.0;
  for (const auto& row : c.counts) {
    for (std::int64_t joint : row) tp += choose2(joint);
  }
  double together_pred = 0.0, together_gt = 0.0;
  for (std::int64_t s : c.pred_sizes) together_pred += choose2(s);
  for (std::int64_t s : c.gt_sizes) together_gt += choose2(s);
  // Two all-singleton partitions are identical; one-sided degeneracy is a
  // complete disagreement on grouped pairs.
  if (together_pred == 0.0 && together_gt == 0.0) return 1.0;
  if (together_pred == 0.0 || together_gt == 0.0) return 0.0;
  return tp / std::sqrt(together_pred * together_gt);
}

CalibrationAccumulator::CalibrationAccumulator(int fine_bins) {
  if (fine_bins < 1)
    throw std::invalid_argument("calibration: need at least one bin");
  n_.assign(fine_bins, 0);
  sum_p_.assign(fine_bins, 0.0);
  n_correct_.assign(fine_bins, 0);
}

void CalibrationAccumulator::add(double p, bool correct) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("calibration: probability outside [0, 1]");
  const int bins = fine_bins();
  const int idx = std::min(bins - 1, static_cast<int>(p * bins));
  n_[idx] += 1;
  sum_p_[idx] += p;
  n_correct_[idx] += correct ? 1 : 0;
}

void CalibrationAccumulator::merge(const CalibrationAccumulator& other) {
  if (other.fine_bins() != fine_bins())
    throw std::invalid_argument("calibration: accumulator widths differ");
  for (int i = 0; i < fine_bins(); ++i) {
    n_[i] += other.n_[i];
    sum_p_[i] += other.sum_p_[i];
    n_correct_[i] += other.n_correct_[i];
  }
}

std::int64_t CalibrationAccumulator::total() const {
  std::int64_t total = 0;
  for (std::int64_t c : n_) total += c;
  return total;
}

CalibrationReport CalibrationAccumulator::report(int n_bins) const {
  const int fine = fine_bins();
  if (n_bins < 1 || fine % n_bins != 0)
    throw std::invalid_argument("calibration: bin count must divide " +
                                std::to_string(fine));
  const std::int64_t grand_total = total();
  if (grand_total == 0)
    throw std::invalid_argument("calibration: no solutions accumulated");
  const int stride = fine / n_bins;
  CalibrationReport report;
  report.total = grand_total;
  for (int b = 0; b < n_bins; ++b) {
    CalibrationBin bin;
    bin.lower = static_cast<double>(b) / n_bins;
    bin.upper = static_cast<double>(b + 1) / n_bins;
    double sum_p = 0.0;
    std::int64_t correct = 0;
    for (int f = b * stride; f < (b + 1) * stride; ++f) {
      bin.n_solutions += n_[f];
      sum_p += sum_p_[f];
      correct += n_correct_[f];
    }
    if (bin.n_solutions > 0) {
      bin.mean_predicted_p = sum_p / bin.n_solutions;
      bin.empirical_correct_fraction =
          static_cast<double>(correct) / bin.n_solutions;
      report.ece += (static_cast<double>(bin.n_solutions) / grand_total) *
                    std::abs(bin.mean_predicted_p - bin.empirical_correct_fraction);
    }
    report.bins.push_back(bin);
  }
  return report;
}

nlohmann::ordered_json CalibrationAccumulator::to_json() const {
  return {{"fine_bins", fine_bins()},
          {"n", n_},
          {"sum_p", sum_p_},
          {"n_correct", n_correct_}};
}

CalibrationAccumulator CalibrationAccumulator::from_json(const nlohmann::json& j) {
  CalibrationAccumulator acc(j.at("fine_bins").get<int>());
  acc.n_ = j.at("n").get<std::vector<std::int64_t>>();
  acc.sum_p_ = j.at("sum_p").get<std::vector<double>>();
  acc.n_correct_ = j.at("n_correct").get<std::vector<std::int64_t>>();
  if (acc.n_.size() != acc.sum_p_.size() || acc.n_.size() != acc.n_correct_.size())
    throw std::invalid_argument("calibration: malformed accumulator");
  return acc;
}

CalibrationReport calibration_report(
    const std::vector<std::pair<double, bool>>& solutions, int n_bins) {
  if (solutions.empty())
    throw std::invalid_argument("calibration_report: empty input");
  CalibrationAccumulator acc(n_bins);
  for (const auto& [p, correct] : solutions) acc.add(p, correct);
  return acc.report(n_bins);
}

SparsificationCurve sparsification(const std::vector<SparsificationInput>& tasks,
                                   const std::vector<double>& grid) {
  if (tasks.empty())
    throw std::invalid_argument("sparsification: empty task list");
  const std::int64_t n = static_cast<std::int64_t>(tasks.size());

  auto order_by = [&](auto key) {
    std::vector<int> idx(tasks.size());
    for (std::size_t i = 0; i < tasks.size(); ++i) idx[i] = static_cast<int>(i);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
      if (key(tasks[a]) != key(tasks[b])) return key(tasks[a]) < key(tasks[b]);
      return tasks[a].task_id < tasks[b].task_id;
    });
    return idx;
  };
  const std::vector<int> by_p =
      order_by([](const SparsificationInput& t) { return t.predicted_p; });
  const std::vector<int> by_metric =
      order_by([](const SparsificationInput& t) { return t.metric_value; });

  // Suffix means over each ordering: mean of the tasks that survive after
  // removing the first m.
  auto suffix_means = [&](const std::vector<int>& order) {
    std::vector<double> means(tasks.size());
    double sum = 0.0;
    for (std::int64_t i = n - 1; i >= 0; --i) {
      sum += tasks[order[i]].metric_value;
      means[i] = sum / static_cast<double>(n - i);
    }
    return means;
  };
  const std::vector<double> pred_means = suffix_means(by_p);
  const std::vector<double> oracle_means = suffix_means(by_metric);

  SparsificationCurve curve;
  for (double f : grid) {
    if (!(f >= 0.0 && f < 1.0))
      throw std::invalid_argument("sparsification: fractions must lie in [0, 1)");
    std::int64_t removed = static_cast<std::int64_t>(f * n);
    removed = std::min(removed, n - 1);
    curve.fractions_removed.push_back(f);
    curve.metric_predicted.push_back(pred_means[removed]);
    curve.metric_oracle.push_back(oracle_means[removed]);
  }
  return curve;
}

nlohmann::ordered_json calibration_to_json(const CalibrationReport& r) {
  nlohmann::ordered_json j;
  j["ece"] = r.ece;
  j["total"] = r.total;
  auto bins = nlohmann::ordered_json::array();
  for (const auto& b : r.bins) {
    bins.push_back({{"lower", b.lower},
                    {"upper", b.upper},
                    {"n", b.n_solutions},
                    {"mean_p", b.mean_predicted_p},
                    {"frac_correct", b.empirical_correct_fraction}});
  }
  j["bins"] = std::move(bins);
  return j;
}

nlohmann::ordered_json sparsification_to_json(const SparsificationCurve& c) {
  return {{"fractions_removed", c.fractions_removed},
          {"predicted", c.metric_predicted},
          {"oracle", c.metric_oracle}};
}

SparsificationCurve sparsification_from_json(const nlohmann::json& j) {
  SparsificationCurve c;
  c.fractions_removed = j.at("fractions_removed").get<std::vector<double>>();
  c.metric_predicted = j.at("predicted").get<std::vector<double>>();
  c.metric_oracle = j.at("oracle").get<std::vector<double>>();
  return c;
}

}  // namespace bkm
