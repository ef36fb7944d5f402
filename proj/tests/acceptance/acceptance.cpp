// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Heavy suites are shared across criteria; every threshold
// is pinned in code.
//
// Usage: acceptance [--cli /path/to/bkm]
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "bkm/balanced_kmeans.hpp"
#include "bkm/data_io.hpp"
#include "bkm/lagrange.hpp"
#include "bkm/maxset.hpp"
#include "bkm/metrics.hpp"
#include "bkm/posterior.hpp"
#include "bkm/qubo.hpp"
#include "bkm/rng.hpp"
#include "bkm/sampler.hpp"
#include "bkm/task.hpp"
#include "../test_util.hpp"

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int criteria_failed = 0;

void report(int criterion, bool pass, const std::string& label,
            const std::string& detail) {
  if (!pass) ++criteria_failed;
  std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion,
              label.c_str(), detail.c_str());
  std::fflush(stdout);
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bkm::ClusteringTask make_generated(int k, int n_per_cluster, int dim,
                                   std::uint64_t seed) {
  bkm::GenParams params;
  params.k = k;
  params.n_per_cluster = n_per_cluster;
  params.dim = dim;
  params.d_min = 2.0;
  params.d_max = 6.0;
  params.seed = seed;
  params.task_id = "acc-" + std::to_string(seed);
  return bkm::generate_task(params);
}

bkm::PosteriorTable sa_pipeline(const bkm::ClusteringTask& task,
                                std::uint64_t seed) {
  bkm::AnnealSchedule tune_sched;
  tune_sched.reads = 500;
  tune_sched.sweeps = 30;
  const auto tuned = bkm::tune_lambda(task, tune_sched, seed);
  const auto qubo = bkm::build_qubo(task, tuned.lambda);
  bkm::AnnealSchedule sched;
  sched.reads = 5000;
  sched.sweeps = 30;
  const auto samples = bkm::sample_sa(qubo, tuned.schedule(sched),
                                      bkm::derive_seed(seed, 0xf1a1ULL));
  return bkm::reparametrize(samples, task);
}

std::vector<int> restrict_labels(const std::vector<int>& labels,
                                 const std::vector<std::uint8_t>& mask) {
  std::vector<int> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (mask[i]) out.push_back(labels[i]);
  }
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

double percentile95(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t idx =
      std::min(v.size() - 1, static_cast<std::size_t>(0.95 * v.size()));
  return v[idx];
}

// ---------------------------------------------------------------------------
// Criterion 1: SA posterior vs exact posterior (K=2, I=10), TV distance.
// ---------------------------------------------------------------------------
void criterion_1() {
  const auto t0 = Clock::now();
  std::vector<double> tvs;
  for (int i = 0; i < 50; ++i) {
    const auto task = make_generated(2, 5, 2, bkm::derive_seed(101, i));
    const auto approx = sa_pipeline(task, task.seed);
    const auto gold = bkm::exact_posterior(task);
    tvs.push_back(test_util::total_variation(approx, gold));
  }
  const double med = median(tvs);
  const double p95 = percentile95(tvs);
  const double elapsed = seconds_since(t0);
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "median TV %.4f < 0.05, p95 %.4f < 0.15, %.1fs < 120s", med,
                p95, elapsed);
  report(1, med < 0.05 && p95 < 0.15 && elapsed < 120.0,
         "SA posterior matches the exact oracle on 2x5 tasks", detail);
}

// ---------------------------------------------------------------------------
// Shared 300-task suite (K=3, n=5, dim=2) used by criteria 2, 3, 6 and 7.
// ---------------------------------------------------------------------------
struct SuiteResults {
  // Per-task metric values per solver, in task order.
  std::map<std::string, std::map<std::string, std::vector<double>>> metrics;
  std::map<std::string, std::vector<double>> map_probability;
  bkm::CalibrationAccumulator calib_exact{100};
  bkm::CalibrationAccumulator calib_sa{100};
  bkm::CalibrationAccumulator maxset_calib{100};
  int maxset_monotone_ok = 0;
  int maxset_checked = 0;
  double runtime_s = 0.0;
};

const std::vector<std::string> kMetricNames = {"accuracy", "completeness",
                                               "adjusted_rand",
                                               "fowlkes_mallows"};

double metric_by_name(const std::string& name, const bkm::Assignment& pred,
                      const std::vector<int>& gt) {
  if (name == "accuracy") return bkm::accuracy(pred, gt);
  if (name == "completeness") return bkm::completeness(pred, gt);
  if (name == "adjusted_rand") return bkm::adjusted_rand(pred, gt);
  return bkm::fowlkes_mallows(pred, gt);
}

SuiteResults run_shared_suite() {
  const auto t0 = Clock::now();
  SuiteResults results;
  const int n_tasks = 300;
  for (int i = 0; i < n_tasks; ++i) {
    const auto task = make_generated(3, 5, 2, bkm::derive_seed(202, i));
    const auto& gt = *task.ground_truth;
    const auto gt_key = bkm::canonicalize(bkm::Assignment(gt));

    const auto exact = bkm::exact_posterior(task);
    const auto sa = sa_pipeline(task, task.seed);
    const auto km = bkm::balanced_kmeans(task, 1000, task.seed);

    const auto record = [&](const std::string& solver,
                            const std::vector<int>& pred_labels, double map_p) {
      const bkm::Assignment pred(pred_labels);
      for (const auto& metric : kMetricNames) {
        results.metrics[solver][metric].push_back(metric_by_name(metric, pred, gt));
      }
      results.map_probability[solver].push_back(map_p);
    };
    record("exhaustive", exact.rows.front().partition.labels,
           exact.rows.front().probability);
    record("sa", sa.rows.front().partition.labels, sa.rows.front().probability);
    record("kmeans", km.assignment.labels, 0.0);

    for (const auto& row : exact.rows) {
      results.calib_exact.add(row.probability, row.partition == gt_key);
    }
    for (const auto& row : sa.rows) {
      results.calib_sa.add(row.probability, row.partition == gt_key);
    }

    // Maxsets on the exact posterior at the paper-figure target p_min = 0.9.
    // The accumulated probability is a lower bound on the subset posterior
    // (unmerged rows can still agree on the retained points), so low targets
    // are structurally underconfident; at 0.9 the slack is bounded by 0.1
    // and the calibration band is meaningful. Monotonicity is checked on the
    // first 100 tasks (criterion 6 wording).
    {
      const auto maxset = bkm::maxset_search(exact, 0.9);
      if (i < 100) {
        ++results.maxset_checked;
        bool ok = true;
        double prev_p = 0.0;
        int prev_retained = task.num_points() + 1;
        std::vector<std::uint8_t> mask(task.num_points(), 1);
        for (const auto& step : maxset.trace) {
          if (!(step.accumulated_p > prev_p)) ok = false;
          prev_p = step.accumulated_p;
          for (int point : step.removed_points) mask[point] = 0;
          int retained = 0;
          for (auto m : mask) retained += m;
          if (retained > prev_retained) ok = false;
          prev_retained = retained;
        }
        if (mask != maxset.retained) ok = false;
        if (ok) ++results.maxset_monotone_ok;
      }
      const auto consensus_key = bkm::canonicalize(
          bkm::Assignment(restrict_labels(maxset.consensus, maxset.retained)));
      const auto gt_sub_key = bkm::canonicalize(
          bkm::Assignment(restrict_labels(gt, maxset.retained)));
      results.maxset_calib.add(std::min(1.0, maxset.accumulated_p),
                               consensus_key == gt_sub_key);
    }
  }
  results.runtime_s = seconds_since(t0);
  return results;
}

// Criterion 2: calibration of the exact and SA pipelines.
void criterion_2(const SuiteResults& results) {
  const auto exact_report = results.calib_exact.report(10);
  const auto sa_report = results.calib_sa.report(10);
  double worst_gap = 0.0;
  for (const auto& bin : exact_report.bins) {
    if (bin.n_solutions < 100) continue;
    worst_gap = std::max(worst_gap, std::abs(bin.mean_predicted_p -
                                             bin.empirical_correct_fraction));
  }
  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "exact ECE %.4f < 0.05, worst populated-bin gap %.4f < 0.08, "
                "SA ECE %.4f < 0.10, suite %.0fs < 600s",
                exact_report.ece, worst_gap, sa_report.ece, results.runtime_s);
  report(2,
         exact_report.ece < 0.05 && worst_gap < 0.08 && sa_report.ece < 0.10 &&
             results.runtime_s < 600.0,
         "posterior probabilities are calibrated on 3x5 tasks", detail);
}

// Criterion 3: solver ordering and absolute levels on the 3x5 suite. The +-8
// absolute band applies to the SA metrics against the published SIM row (the
// tolerance exists because the vendor SA variant is unspecified); the k-means
// baseline is additionally pinned by its own module test (accuracy within +-5
// of 51.3).
void criterion_3(const SuiteResults& results) {
  const std::map<std::string, double> sim_reference = {
      {"accuracy", 56.4},
      {"completeness", 79.5},
      {"adjusted_rand", 74.7},
      {"fowlkes_mallows", 81.9}};
  auto mean_percent = [&](const std::string& solver, const std::string& metric) {
    const auto& values = results.metrics.at(solver).at(metric);
    double mean = 0.0;
    for (double v : values) mean += v;
    return 100.0 * mean / static_cast<double>(values.size());
  };
  bool pass = true;
  std::ostringstream detail;
  detail.precision(3);
  for (const auto& metric : kMetricNames) {
    const double sa = mean_percent("sa", metric);
    const double km = mean_percent("kmeans", metric);
    if (sa < km - 2.0) pass = false;
    if (std::abs(sa - sim_reference.at(metric)) > 8.0) pass = false;
  }
  const double sa_acc = mean_percent("sa", "accuracy");
  const double ex_acc = mean_percent("exhaustive", "accuracy");
  if (std::abs(sa_acc - ex_acc) > 3.0) pass = false;
  detail << "acc sa " << sa_acc << " / kmeans " << mean_percent("kmeans", "accuracy")
         << " / exhaustive " << ex_acc << "; sa >= kmeans - 2 on all four"
         << " metrics, sa within 8 of the SIM row, |sa - exhaustive| <= 3";
  report(3, pass, "solver ordering matches the published 3x5 comparison",
         detail.str());
}

// Criterion 6: maxset monotonicity and consensus calibration.
void criterion_6(const SuiteResults& results) {
  const auto report_bins = results.maxset_calib.report(10);
  double worst_gap = 0.0;
  for (const auto& bin : report_bins.bins) {
    if (bin.n_solutions < 100) continue;
    worst_gap = std::max(worst_gap, std::abs(bin.mean_predicted_p -
                                             bin.empirical_correct_fraction));
  }
  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "monotone trace on %d/%d tasks, populated-bin gap %.4f < 0.08",
                results.maxset_monotone_ok, results.maxset_checked, worst_gap);
  report(6,
         results.maxset_monotone_ok == results.maxset_checked &&
             results.maxset_checked == 100 && worst_gap < 0.08,
         "maxset traces shrink monotonically and stay calibrated", detail);
}

// Criterion 7: sparsification sanity.
void criterion_7(const SuiteResults& results) {
  std::vector<double> grid;
  for (int i = 0; i < 20; ++i) grid.push_back(0.05 * i);
  bool dominance = true;
  bool monotone = true;
  for (const std::string solver : {"exhaustive", "sa"}) {
    for (const auto& metric : kMetricNames) {
      std::vector<bkm::SparsificationInput> inputs;
      const auto& values = results.metrics.at(solver).at(metric);
      const auto& probs = results.map_probability.at(solver);
      for (std::size_t i = 0; i < values.size(); ++i) {
        inputs.push_back({probs[i], values[i], "t" + std::to_string(i)});
      }
      const auto curve = bkm::sparsification(inputs, grid);
      for (std::size_t g = 0; g < grid.size(); ++g) {
        if (curve.metric_oracle[g] < curve.metric_predicted[g] - 1e-12) {
          dominance = false;
        }
      }
      if (solver == "exhaustive") {
        // 5-point moving average, then require a non-decreasing sequence.
        std::vector<double> smooth;
        for (std::size_t g = 0; g + 5 <= curve.metric_predicted.size(); ++g) {
          double sum = 0.0;
          for (std::size_t w = 0; w < 5; ++w) sum += curve.metric_predicted[g + w];
          smooth.push_back(sum / 5.0);
        }
        for (std::size_t g = 1; g < smooth.size(); ++g) {
          if (smooth[g] < smooth[g - 1] - 1e-9) monotone = false;
        }
      }
    }
  }
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "oracle dominates on 2 solvers x 4 metrics, smoothed exhaustive "
                "curves monotone: %s",
                monotone ? "yes" : "no");
  report(7, dominance && monotone, "sparsification curves are sane", detail);
}

// ---------------------------------------------------------------------------
// Criterion 4: tuned penalties make the unconstrained argmin feasible.
// ---------------------------------------------------------------------------
void criterion_4() {
  int ok = 0;
  const int n_tasks = 100;
  const std::vector<std::vector<int>> shapes = {{3, 3}, {2, 2}, {1, 1, 2},
                                                {3, 2}, {2, 2, 2}, {4, 2}};
  for (int i = 0; i < n_tasks; ++i) {
    const auto sizes = shapes[i % shapes.size()];
    auto task = test_util::random_task(sizes, 1 + i % 3,
                                       bkm::derive_seed(404, i), 2.5);
    bkm::AnnealSchedule sched;
    sched.reads = 200;
    const auto tuned = bkm::tune_lambda(task, sched, task.seed);
    const auto p = bkm::build_qubo(task, tuned.lambda);

    bkm::BitVec best;
    double best_energy = std::numeric_limits<double>::infinity();
    for (std::uint64_t mask = 0; mask < (1ULL << task.num_vars()); ++mask) {
      bkm::BitVec z(task.num_vars());
      for (int v = 0; v < task.num_vars(); ++v) z[v] = (mask >> v) & 1 ? 1 : 0;
      const double e = bkm::qubo_energy(p, z);
      if (e < best_energy) {
        best_energy = e;
        best = z;
      }
    }
    const auto assignment = bkm::try_devectorize(best, task);
    if (!assignment || !bkm::is_feasible(*assignment, task)) continue;

    const auto exact = bkm::enumerate_exhaustive(task, p);
    double constrained_best = std::numeric_limits<double>::infinity();
    bkm::BitVec constrained_z;
    for (const auto& e : exact.entries) {
      if (e.energy < constrained_best) {
        constrained_best = e.energy;
        constrained_z = e.z;
      }
    }
    if (bkm::canonicalize(*assignment) ==
        bkm::canonicalize(bkm::devectorize(constrained_z, task))) {
      ++ok;
    }
  }
  char detail[80];
  std::snprintf(detail, sizeof(detail), "%d/%d tiny tasks", ok, n_tasks);
  report(4, ok == n_tasks,
         "brute-force argmin is feasible and optimal under tuned lambda", detail);
}

// ---------------------------------------------------------------------------
// Criterion 5: QUBO energies equal exact Gaussian energies.
// ---------------------------------------------------------------------------
void criterion_5() {
  bkm::Rng rng(505);
  int ok = 0;
  const int n_pairs = 1000;
  for (int i = 0; i < n_pairs; ++i) {
    const int k = rng.uniform_int(1, 4);
    std::vector<int> sizes(k);
    int total = 0;
    for (auto& s : sizes) {
      s = rng.uniform_int(1, 4);
      total += s;
    }
    auto task = test_util::random_task(sizes, rng.uniform_int(1, 4),
                                       rng.next_u64(), 4.0);
    // Random feasible labeling: a shuffled multiset of cluster labels.
    std::vector<int> labels;
    for (int c = 0; c < k; ++c) {
      labels.insert(labels.end(), sizes[c], c);
    }
    rng.shuffle(labels);
    const bkm::Assignment a(labels);
    const double lambda = rng.uniform(0.5, 50.0);
    const auto p = bkm::build_qubo(task, lambda);
    const double qubo = bkm::qubo_energy(p, bkm::vectorize(a, task));
    const double exact = bkm::exact_energy(task, a);
    if (std::abs(qubo - exact) < 1e-9) ++ok;
  }
  char detail[80];
  std::snprintf(detail, sizeof(detail), "%d/%d pairs within 1e-9", ok, n_pairs);
  report(5, ok == n_pairs, "penalized QUBO energy equals the exact energy",
         detail);
}

// ---------------------------------------------------------------------------
// Criterion 8: metric implementations vs brute-force oracles.
// ---------------------------------------------------------------------------
void criterion_8() {
  bkm::Rng rng(808);
  int ok = 0;
  const int n_pairs = 1000;
  for (int i = 0; i < n_pairs; ++i) {
    const int n = rng.uniform_int(2, 30);
    const int k = rng.uniform_int(1, 5);
    std::vector<int> pred(n), gt(n);
    for (int j = 0; j < n; ++j) {
      pred[j] = rng.uniform_int(0, k - 1);
      gt[j] = rng.uniform_int(0, k - 1);
    }
    // Pair-count oracle.
    double a = 0, b = 0, c = 0, d = 0;
    for (int x = 0; x < n; ++x) {
      for (int y = x + 1; y < n; ++y) {
        const bool same_pred = pred[x] == pred[y];
        const bool same_gt = gt[x] == gt[y];
        if (same_pred && same_gt) a += 1;
        else if (same_pred) b += 1;
        else if (same_gt) c += 1;
        else d += 1;
      }
    }
    const double ari_denom = (a + b) * (b + d) + (a + c) * (c + d);
    const double ari_oracle = ari_denom == 0.0 ? 1.0 : 2.0 * (a * d - b * c) / ari_denom;
    double fm_oracle = 0.0;
    if (a + b == 0.0 && a + c == 0.0) fm_oracle = 1.0;
    else if (a + b > 0.0 && a + c > 0.0) fm_oracle = a / std::sqrt((a + b) * (a + c));

    // Entropy-table oracle for completeness.
    std::map<int, int> pred_counts, gt_counts;
    std::map<std::pair<int, int>, int> joint;
    for (int j = 0; j < n; ++j) {
      ++pred_counts[pred[j]];
      ++gt_counts[gt[j]];
      ++joint[{pred[j], gt[j]}];
    }
    auto entropy = [&](const auto& counts) {
      double h = 0.0;
      for (const auto& [key, count] : counts) {
        const double p = static_cast<double>(count) / n;
        h -= p * std::log(p);
      }
      return h;
    };
    const double h_pred = entropy(pred_counts);
    const double completeness_oracle =
        h_pred == 0.0 ? 1.0
                      : 1.0 - (entropy(joint) - entropy(gt_counts)) / h_pred;

    const bkm::Assignment pa(pred);
    const bool match =
        std::abs(bkm::adjusted_rand(pa, gt) - ari_oracle) < 1e-12 &&
        std::abs(bkm::fowlkes_mallows(pa, gt) - fm_oracle) < 1e-12 &&
        std::abs(bkm::completeness(pa, gt) - completeness_oracle) < 1e-12;
    if (match) ++ok;
  }
  char detail[80];
  std::snprintf(detail, sizeof(detail), "%d/%d label pairs within 1e-12", ok,
                n_pairs);
  report(8, ok == n_pairs, "metrics agree with independent oracles", detail);
}

// ---------------------------------------------------------------------------
// Criterion 9: the CLI pipeline is byte-deterministic.
// ---------------------------------------------------------------------------
void criterion_9(const std::string& cli) {
  if (cli.empty()) {
    report(9, false, "pipeline determinism", "no --cli path given");
    return;
  }
  const fs::path work = fs::temp_directory_path() / "bkm_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);
  auto sh = [&](const std::string& args) {
    const std::string cmd = cli + " " + args + " >/dev/null 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str()));
  };
  auto slurp = [](const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  bool pass = true;
  for (const std::string run : {"a", "b"}) {
    const std::string suite = (work / ("suite_" + run)).string();
    if (sh("generate --k 2 --points-per-cluster 3 --dim 2 --dmin 2 --dmax 6 "
           "--tasks 20 --seed 77 --out " + suite) != 0) pass = false;
    if (sh("solve --suite " + suite + "/suite.json --solver sa --reads 800 "
           "--sweeps 30 --pmin 0.8 --seed 5 --out " +
           (work / ("results_" + run)).string()) != 0) pass = false;
  }
  const std::string suite_a = slurp(work / "suite_a" / "suite.json");
  const std::string suite_b = slurp(work / "suite_b" / "suite.json");
  const std::string results_a = slurp(work / "results_a" / "results.json");
  const std::string results_b = slurp(work / "results_b" / "results.json");
  if (suite_a.empty() || suite_a != suite_b) pass = false;
  if (results_a.empty() || results_a != results_b) pass = false;
  report(9, pass, "two identically seeded pipeline runs match byte for byte",
         pass ? "suite and results manifests identical" : "manifests differ");
  fs::remove_all(work);
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--cli") cli = argv[i + 1];
  }
  const auto t0 = Clock::now();

  criterion_1();
  const SuiteResults shared = run_shared_suite();
  criterion_2(shared);
  criterion_3(shared);
  criterion_4();
  criterion_5();
  criterion_6(shared);
  criterion_7(shared);
  criterion_8();
  criterion_9(cli);

  std::printf("acceptance: %d criteria failed, total %.1fs\n", criteria_failed,
              seconds_since(t0));
  return criteria_failed == 0 ? 0 : 1;
}
