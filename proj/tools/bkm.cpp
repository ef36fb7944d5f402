// bkm: balanced k-means with sampled posteriors.
//
// Subcommands:
//   generate  write a suite of synthetic clustering tasks
//   solve     run a solver over a suite (sa | exhaustive | kmeans)
//   evaluate  clustering metrics, calibration and sparsification reports
//   plot      static SVG renderings of the reports
//
// Every run is a pure function of its seed and flags: file contents carry no
// timestamps, and per-task work derives independent RNG streams, so reruns
// are byte-identical regardless of --jobs.
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bkm/balanced_kmeans.hpp"
#include "bkm/data_io.hpp"
#include "bkm/lagrange.hpp"
#include "bkm/maxset.hpp"
#include "bkm/metrics.hpp"
#include "bkm/posterior.hpp"
#include "bkm/qubo.hpp"
#include "bkm/rng.hpp"
#include "bkm/sampler.hpp"
#include "bkm/svg.hpp"
#include "bkm/task.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitUsage = 2;

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string dump_json(const ordered_json& j) { return j.dump(2) + "\n"; }

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  json j;
  in >> j;
  return j;
}

std::uint64_t effective_seed(std::uint64_t flag_seed) {
  if (const char* env = std::getenv("BKM_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return flag_seed;
}

void parallel_for(int n, int jobs, const std::function<void(int)>& body) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      body(i);
    }
  };
  std::vector<std::thread> pool;
  for (int j = 0; j < std::min(jobs, n); ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

struct GenerateArgs {
  int k = 3;
  int points_per_cluster = 5;
  int dim = 2;
  double d_min = 2.0;
  double d_max = 6.0;
  int tasks = 100;
  std::uint64_t seed = 0;
  std::string out;
};

int run_generate(const GenerateArgs& args) {
  const std::uint64_t seed = effective_seed(args.seed);
  const fs::path out_dir(args.out);
  fs::create_directories(out_dir / "tasks");

  ordered_json manifest;
  manifest["suite_id"] = "suite-" + std::to_string(seed);
  manifest["seed"] = seed;
  manifest["generator"] = {{"k", args.k},
                           {"points_per_cluster", args.points_per_cluster},
                           {"dim", args.dim},
                           {"d_min", args.d_min},
                           {"d_max", args.d_max},
                           {"tasks", args.tasks}};
  auto task_list = ordered_json::array();
  std::map<std::string, std::string> hashes;
  int failures = 0;
  for (int i = 0; i < args.tasks; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "t%05d", i);
    bkm::GenParams params;
    params.k = args.k;
    params.n_per_cluster = args.points_per_cluster;
    params.dim = args.dim;
    params.d_min = args.d_min;
    params.d_max = args.d_max;
    params.seed = bkm::derive_seed(seed, static_cast<std::uint64_t>(i));
    params.task_id = name;
    try {
      const bkm::ClusteringTask task = bkm::generate_task(params);
      const std::string rel = std::string("tasks/") + name + ".json";
      const std::string body = dump_json(bkm::task_to_json(task));
      write_file(out_dir / rel, body);
      hashes[rel] = fnv1a64_hex(body);
      task_list.push_back({{"task_id", name}, {"file", rel}, {"seed", params.seed}});
    } catch (const std::exception& ex) {
      ++failures;
      task_list.push_back({{"task_id", name}, {"error", ex.what()}});
      std::cerr << "generate: task " << name << " failed: " << ex.what() << "\n";
    }
  }
  manifest["tasks"] = std::move(task_list);
  manifest["file_hashes"] = hashes;
  write_file(out_dir / "suite.json", dump_json(manifest));
  std::cerr << "generate: wrote " << (args.tasks - failures) << "/" << args.tasks
            << " tasks to " << out_dir.string() << "\n";
  return failures == 0 ? kExitOk : kExitPartial;
}

// ---------------------------------------------------------------------------
// subsample: balanced task suites drawn from a labeled CSV dataset
// ---------------------------------------------------------------------------

struct SubsampleArgs {
  std::string csv;
  std::vector<std::string> features;
  std::string label;
  int k = 3;
  int points_per_cluster = 5;
  int dims = 0;  // 0 = all features
  int tasks = 10;
  std::uint64_t seed = 0;
  std::string out;
};

int run_subsample(const SubsampleArgs& args) {
  const std::uint64_t seed = effective_seed(args.seed);
  const bkm::Dataset data = bkm::load_csv(args.csv, args.features, args.label);
  const int dims = args.dims > 0 ? args.dims : static_cast<int>(args.features.size());
  const fs::path out_dir(args.out);
  fs::create_directories(out_dir / "tasks");

  ordered_json manifest;
  manifest["suite_id"] = "subsample-" + std::to_string(seed);
  manifest["seed"] = seed;
  manifest["generator"] = {{"csv", args.csv},
                           {"k", args.k},
                           {"points_per_cluster", args.points_per_cluster},
                           {"dims", dims},
                           {"tasks", args.tasks}};
  auto task_list = ordered_json::array();
  std::map<std::string, std::string> hashes;
  int failures = 0;
  for (int i = 0; i < args.tasks; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "t%05d", i);
    try {
      bkm::ClusteringTask task = bkm::subsample_balanced(
          data, args.k, args.points_per_cluster, dims,
          bkm::derive_seed(seed, static_cast<std::uint64_t>(i)));
      task.task_id = name;
      const std::string rel = std::string("tasks/") + name + ".json";
      const std::string body = dump_json(bkm::task_to_json(task));
      write_file(out_dir / rel, body);
      hashes[rel] = fnv1a64_hex(body);
      task_list.push_back({{"task_id", name}, {"file", rel}, {"seed", task.seed}});
    } catch (const std::exception& ex) {
      ++failures;
      task_list.push_back({{"task_id", name}, {"error", ex.what()}});
      std::cerr << "subsample: task " << name << " failed: " << ex.what() << "\n";
    }
  }
  manifest["tasks"] = std::move(task_list);
  manifest["file_hashes"] = hashes;
  write_file(out_dir / "suite.json", dump_json(manifest));
  std::cerr << "subsample: wrote " << (args.tasks - failures) << "/" << args.tasks
            << " tasks to " << out_dir.string() << "\n";
  return failures == 0 ? kExitOk : kExitPartial;
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

struct SolveArgs {
  std::string suite;
  std::string solver = "sa";
  std::int64_t reads = 5000;
  int sweeps = 30;
  double pmin = 0.0;  // 0 = no maxset extraction
  std::uint64_t seed = 0;
  int jobs = 1;
  int max_posterior_rows = 2000;
  std::uint64_t exhaustive_cap = 10'000'000;
  std::string out;
};

struct TaskOutcome {
  ordered_json manifest_entry;
  std::map<std::string, std::string> hashes;
  bool ok = false;
};

// Posterior file: trimmed rows plus an exact fine-binned calibration
// accumulator over all rows, so downstream pooling never needs the full table.
ordered_json posterior_file_body(const bkm::ClusteringTask& task,
                                 const bkm::PosteriorTable& pt, double lambda,
                                 int max_rows) {
  ordered_json body;
  body["task_id"] = task.task_id;
  body["lambda"] = lambda;
  body["feasible_fraction"] = pt.feasible_fraction;
  body["n_rows_total"] = pt.rows.size();
  body["truncated"] = static_cast<int>(pt.rows.size()) > max_rows;
  auto rows = ordered_json::array();
  const int emit = std::min<int>(max_rows, static_cast<int>(pt.rows.size()));
  for (int i = 0; i < emit; ++i) {
    const auto& row = pt.rows[i];
    rows.push_back({{"partition", row.partition.labels},
                    {"energy", row.energy},
                    {"probability", row.probability},
                    {"count", row.observed_count}});
  }
  body["rows"] = std::move(rows);
  if (task.ground_truth) {
    const bkm::PartitionKey gt_key =
        bkm::canonicalize(bkm::Assignment(*task.ground_truth));
    bkm::CalibrationAccumulator acc(100);
    for (const auto& row : pt.rows) {
      acc.add(row.probability, row.partition == gt_key);
    }
    body["calibration_hist"] = acc.to_json();
  }
  return body;
}

TaskOutcome solve_one(const SolveArgs& args, const fs::path& out_dir,
                      const bkm::ClusteringTask& task) {
  TaskOutcome outcome;
  ordered_json& entry = outcome.manifest_entry;
  entry["task_id"] = task.task_id;
  const std::uint64_t solve_seed = bkm::derive_seed(task.seed, args.seed);

  auto emit = [&](const std::string& rel, const ordered_json& j) {
    const std::string body = dump_json(j);
    write_file(out_dir / rel, body);
    outcome.hashes[rel] = fnv1a64_hex(body);
    entry["files"][rel.substr(0, rel.find('/'))] = rel;
  };

  try {
    if (args.solver == "kmeans") {
      const bkm::KmeansResult km = bkm::balanced_kmeans(task, 1000, solve_seed);
      ordered_json body;
      body["task_id"] = task.task_id;
      body["labels"] = km.assignment.labels;
      body["energy"] = km.energy;
      body["iterations"] = km.iterations;
      body["converged"] = km.converged;
      body["energy_trace"] = km.energy_trace;
      emit("kmeans/" + task.task_id + ".json", body);
      entry["status"] = "ok";
      outcome.ok = true;
      return outcome;
    }

    // Posterior solvers share the lambda estimate and the reporting tail.
    double lambda = 0.0;
    bkm::SampleSet samples;
    if (args.solver == "sa") {
      bkm::AnnealSchedule tune_sched;
      tune_sched.sweeps = args.sweeps;
      tune_sched.reads = std::max<std::int64_t>(200, args.reads / 10);
      const bkm::TuneResult tuned =
          bkm::tune_lambda(task, tune_sched, solve_seed);
      lambda = tuned.lambda;
      auto rounds = ordered_json::array();
      for (const auto& r : tuned.rounds) {
        rounds.push_back({{"lambda", r.lambda},
                          {"feasible_fraction", r.feasible_fraction}});
      }
      entry["tune_rounds"] = std::move(rounds);
      const bkm::QuboProblem qubo = bkm::build_qubo(task, lambda);
      bkm::AnnealSchedule sched;
      sched.sweeps = args.sweeps;
      sched.reads = args.reads;
      samples = bkm::sample_sa(qubo, tuned.schedule(sched),
                               bkm::derive_seed(solve_seed, 0xf1a1ULL));
    } else if (args.solver == "exhaustive") {
      // Enumeration only visits feasible states, so the first-order bound is
      // all the penalty weight the energies ever need.
      const bkm::KmeansResult km =
          bkm::balanced_kmeans(task, 1000, bkm::derive_seed(solve_seed, 0x5eedULL));
      lambda = bkm::lambda_lower_bound(task, km.assignment);
      const bkm::QuboProblem qubo = bkm::build_qubo(task, lambda);
      samples = bkm::enumerate_exhaustive(task, qubo, args.exhaustive_cap);
    } else {
      throw std::invalid_argument("unknown solver '" + args.solver + "'");
    }
    entry["lambda"] = lambda;

    bkm::PosteriorTable pt;
    try {
      pt = bkm::reparametrize(samples, task);
    } catch (const bkm::empty_posterior_error&) {
      // No feasible measurement: fall back to the k-means baseline and flag.
      const bkm::KmeansResult km =
          bkm::balanced_kmeans(task, 1000, bkm::derive_seed(solve_seed, 0x5eedULL));
      ordered_json map_body;
      map_body["task_id"] = task.task_id;
      map_body["partition"] = bkm::canonicalize(km.assignment).labels;
      map_body["probability"] = 0.0;
      map_body["energy"] = km.energy;
      map_body["fallback"] = true;
      emit("map/" + task.task_id + ".json", map_body);
      entry["status"] = "fallback_kmeans";
      return outcome;
    }
    entry["feasible_fraction"] = pt.feasible_fraction;

    emit("posterior/" + task.task_id + ".json",
         posterior_file_body(task, pt, lambda, args.max_posterior_rows));

    const auto [map_key, map_p] = bkm::map_solution(pt);
    ordered_json map_body;
    map_body["task_id"] = task.task_id;
    map_body["partition"] = map_key.labels;
    map_body["probability"] = map_p;
    map_body["energy"] = pt.rows.front().energy;
    map_body["fallback"] = false;
    emit("map/" + task.task_id + ".json", map_body);

    if (args.pmin > 0.0) {
      const bkm::MaxsetResult maxset = bkm::maxset_search(pt, args.pmin);
      ordered_json maxset_body = bkm::maxset_to_json(maxset);
      maxset_body["task_id"] = task.task_id;
      maxset_body["p_min"] = args.pmin;
      emit("maxset/" + task.task_id + ".json", maxset_body);
    }
    entry["status"] = "ok";
    outcome.ok = true;
  } catch (const std::exception& ex) {
    entry["status"] = "error";
    entry["error"] = ex.what();
  }
  return outcome;
}

int run_solve(const SolveArgs& args) {
  SolveArgs effective = args;
  effective.seed = effective_seed(args.seed);
  const json suite = read_json(effective.suite);
  const fs::path suite_dir = fs::path(effective.suite).parent_path();
  const fs::path out_dir(effective.out);
  fs::create_directories(out_dir);

  // One task's failure (including a failure to load) never aborts the run.
  struct PendingTask {
    std::string task_id;
    std::optional<bkm::ClusteringTask> task;
    std::string load_error;
  };
  std::vector<PendingTask> pending;
  for (const auto& tj : suite.at("tasks")) {
    if (!tj.contains("file")) continue;  // generation failure, skip
    PendingTask p;
    p.task_id = tj.value("task_id", std::string("?"));
    try {
      p.task = bkm::load_task(suite_dir / tj.at("file").get<std::string>());
    } catch (const std::exception& ex) {
      p.load_error = ex.what();
    }
    pending.push_back(std::move(p));
  }

  std::vector<TaskOutcome> outcomes(pending.size());
  parallel_for(static_cast<int>(pending.size()), effective.jobs, [&](int i) {
    if (pending[i].task) {
      outcomes[i] = solve_one(effective, out_dir, *pending[i].task);
    } else {
      outcomes[i].manifest_entry["task_id"] = pending[i].task_id;
      outcomes[i].manifest_entry["status"] = "error";
      outcomes[i].manifest_entry["error"] = pending[i].load_error;
    }
  });

  ordered_json manifest;
  manifest["solver"] = effective.solver;
  manifest["suite_id"] = suite.at("suite_id").get<std::string>();
  manifest["params"] = {{"reads", effective.reads},
                        {"sweeps", effective.sweeps},
                        {"pmin", effective.pmin},
                        {"seed", effective.seed},
                        {"max_posterior_rows", effective.max_posterior_rows}};
  auto task_list = ordered_json::array();
  std::map<std::string, std::string> hashes;
  int failures = 0;
  for (const auto& outcome : outcomes) {
    task_list.push_back(outcome.manifest_entry);
    for (const auto& [rel, hash] : outcome.hashes) hashes[rel] = hash;
    if (!outcome.ok) ++failures;
  }
  manifest["tasks"] = std::move(task_list);
  manifest["file_hashes"] = hashes;
  write_file(out_dir / "results.json", dump_json(manifest));
  std::cerr << "solve[" << effective.solver << "]: "
            << (pending.size() - failures) << "/" << pending.size()
            << " tasks ok, results in " << out_dir.string() << "\n";
  return failures == 0 ? kExitOk : kExitPartial;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

struct EvaluateArgs {
  std::string suite;
  std::vector<std::string> results;
  std::string out;
  int bins = 10;
};

struct SolverEval {
  std::string name;
  std::vector<std::string> task_ids;
  std::map<std::string, std::vector<double>> metric_values;
  std::vector<double> predicted_p;
  bkm::CalibrationAccumulator calibration{100};
  bool has_posterior = false;
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

SolverEval evaluate_solver(const fs::path& results_dir,
                           const std::map<std::string, bkm::ClusteringTask>& tasks,
                           const std::string& suite_id) {
  const json manifest = read_json(results_dir / "results.json");
  if (manifest.at("suite_id").get<std::string>() != suite_id)
    throw std::runtime_error("results in " + results_dir.string() +
                             " were solved on suite '" +
                             manifest.at("suite_id").get<std::string>() +
                             "', not '" + suite_id + "'");
  SolverEval eval;
  eval.name = manifest.at("solver").get<std::string>();
  for (const auto& entry : manifest.at("tasks")) {
    const std::string status = entry.at("status").get<std::string>();
    if (status == "error") continue;
    const std::string task_id = entry.at("task_id").get<std::string>();
    const auto task_it = tasks.find(task_id);
    if (task_it == tasks.end())
      throw std::runtime_error("results mention unknown task " + task_id);
    const bkm::ClusteringTask& task = task_it->second;
    if (!task.ground_truth)
      throw std::runtime_error("task " + task_id + " has no ground truth");

    bkm::Assignment pred;
    double predicted_p = 0.0;
    if (eval.name == "kmeans") {
      const json body = read_json(results_dir / "kmeans" / (task_id + ".json"));
      pred.labels = body.at("labels").get<std::vector<int>>();
    } else {
      const json body = read_json(results_dir / "map" / (task_id + ".json"));
      pred.labels = body.at("partition").get<std::vector<int>>();
      predicted_p = body.at("probability").get<double>();
      const fs::path posterior_path =
          results_dir / "posterior" / (task_id + ".json");
      if (fs::exists(posterior_path)) {
        const json posterior = read_json(posterior_path);
        if (posterior.contains("calibration_hist")) {
          eval.calibration.merge(bkm::CalibrationAccumulator::from_json(
              posterior.at("calibration_hist")));
          eval.has_posterior = true;
        }
      }
    }
    eval.task_ids.push_back(task_id);
    eval.predicted_p.push_back(predicted_p);
    for (const auto& metric : kMetricNames) {
      eval.metric_values[metric].push_back(
          metric_by_name(metric, pred, *task.ground_truth));
    }
  }
  return eval;
}

std::pair<double, double> mean_sem(const std::vector<double>& values) {
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var = values.size() > 1 ? var / (n - 1) : 0.0;
  return {mean, std::sqrt(var / n)};
}

int run_evaluate(const EvaluateArgs& args) {
  const json suite = read_json(args.suite);
  const fs::path suite_dir = fs::path(args.suite).parent_path();
  const std::string suite_id = suite.at("suite_id").get<std::string>();
  std::map<std::string, bkm::ClusteringTask> tasks;
  for (const auto& tj : suite.at("tasks")) {
    if (!tj.contains("file")) continue;
    bkm::ClusteringTask t = bkm::load_task(suite_dir / tj.at("file").get<std::string>());
    tasks[t.task_id] = std::move(t);
  }
  if (args.results.empty()) throw std::runtime_error("no --results directories given");

  const fs::path out_dir(args.out);
  fs::create_directories(out_dir);

  ordered_json metrics_json;
  metrics_json["suite_id"] = suite_id;
  std::string metrics_csv = "solver,metric,mean_percent,sem_percent,n_tasks\n";
  std::vector<double> grid;
  for (int i = 0; i < 20; ++i) grid.push_back(0.05 * i);

  for (const auto& dir : args.results) {
    SolverEval eval = evaluate_solver(dir, tasks, suite_id);
    if (eval.task_ids.empty())
      throw std::runtime_error("no usable results in " + dir);

    ordered_json solver_json;
    solver_json["n_tasks"] = eval.task_ids.size();
    for (const auto& metric : kMetricNames) {
      const auto [mean, sem] = mean_sem(eval.metric_values[metric]);
      solver_json["metrics"][metric] = {{"mean", mean * 100.0},
                                        {"sem", sem * 100.0}};
      char line[160];
      std::snprintf(line, sizeof(line), "%s,%s,%.4f,%.4f,%zu\n",
                    eval.name.c_str(), metric.c_str(), mean * 100.0, sem * 100.0,
                    eval.task_ids.size());
      metrics_csv += line;
    }
    metrics_json["solvers"][eval.name] = std::move(solver_json);

    if (eval.has_posterior) {
      const bkm::CalibrationReport report = eval.calibration.report(args.bins);
      ordered_json cal = bkm::calibration_to_json(report);
      cal["solver"] = eval.name;
      write_file(out_dir / ("calibration_" + eval.name + ".json"), dump_json(cal));
      std::string csv = "lower,upper,n,mean_p,frac_correct\n";
      for (const auto& bin : report.bins) {
        char line[160];
        std::snprintf(line, sizeof(line), "%.2f,%.2f,%lld,%.6f,%.6f\n", bin.lower,
                      bin.upper, static_cast<long long>(bin.n_solutions),
                      bin.mean_predicted_p, bin.empirical_correct_fraction);
        csv += line;
      }
      write_file(out_dir / ("calibration_" + eval.name + ".csv"), csv);

      ordered_json spars;
      spars["solver"] = eval.name;
      std::string spars_csv = "metric,fraction_removed,predicted,oracle\n";
      for (const auto& metric : kMetricNames) {
        std::vector<bkm::SparsificationInput> inputs;
        for (std::size_t i = 0; i < eval.task_ids.size(); ++i) {
          inputs.push_back({eval.predicted_p[i], eval.metric_values[metric][i],
                            eval.task_ids[i]});
        }
        const bkm::SparsificationCurve curve = bkm::sparsification(inputs, grid);
        spars["metrics"][metric] = bkm::sparsification_to_json(curve);
        for (std::size_t g = 0; g < curve.fractions_removed.size(); ++g) {
          char line[160];
          std::snprintf(line, sizeof(line), "%s,%.2f,%.6f,%.6f\n", metric.c_str(),
                        curve.fractions_removed[g], curve.metric_predicted[g],
                        curve.metric_oracle[g]);
          spars_csv += line;
        }
      }
      write_file(out_dir / ("sparsification_" + eval.name + ".json"),
                 dump_json(spars));
      write_file(out_dir / ("sparsification_" + eval.name + ".csv"), spars_csv);
    }
  }
  write_file(out_dir / "metrics.json", dump_json(metrics_json));
  write_file(out_dir / "metrics.csv", metrics_csv);
  std::cerr << "evaluate: reports written to " << out_dir.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// plot
// ---------------------------------------------------------------------------

struct PlotArgs {
  std::string report;
  std::string kind;
  std::string task;
  std::string out;
};

int run_plot(const PlotArgs& args) {
  std::string svg;
  if (args.kind == "reliability") {
    const json j = read_json(args.report);
    bkm::CalibrationReport report;
    report.ece = j.at("ece").get<double>();
    report.total = j.at("total").get<std::int64_t>();
    for (const auto& bj : j.at("bins")) {
      bkm::CalibrationBin bin;
      bin.lower = bj.at("lower").get<double>();
      bin.upper = bj.at("upper").get<double>();
      bin.n_solutions = bj.at("n").get<std::int64_t>();
      bin.mean_predicted_p = bj.at("mean_p").get<double>();
      bin.empirical_correct_fraction = bj.at("frac_correct").get<double>();
      report.bins.push_back(bin);
    }
    std::string title = "reliability";
    if (j.contains("solver")) title += " (" + j.at("solver").get<std::string>() + ")";
    svg = bkm::plot_reliability(report, title);
  } else if (args.kind == "sparsification") {
    const json j = read_json(args.report);
    std::vector<std::pair<std::string, bkm::SparsificationCurve>> curves;
    for (const auto& [name, cj] : j.at("metrics").items()) {
      curves.emplace_back(name, bkm::sparsification_from_json(cj));
    }
    std::string title = "sparsification";
    if (j.contains("solver")) title += " (" + j.at("solver").get<std::string>() + ")";
    svg = bkm::plot_sparsification(curves, title);
  } else if (args.kind == "maxset") {
    if (args.task.empty())
      throw std::runtime_error("plot --kind maxset needs --task");
    const bkm::ClusteringTask task = bkm::load_task(args.task);
    const bkm::MaxsetResult maxset = bkm::maxset_from_json(read_json(args.report));
    char title[80];
    std::snprintf(title, sizeof(title), "maxset p=%.2f", maxset.accumulated_p);
    svg = bkm::plot_maxset(task, maxset, title);
  } else if (args.kind == "scatter") {
    if (args.task.empty())
      throw std::runtime_error("plot --kind scatter needs --task");
    const bkm::ClusteringTask task = bkm::load_task(args.task);
    svg = bkm::plot_scatter(task,
                            task.ground_truth ? &*task.ground_truth : nullptr,
                            "task " + task.task_id);
  } else {
    throw std::runtime_error("unknown plot kind '" + args.kind + "'");
  }
  write_file(args.out, svg);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"balanced k-means with sampled posteriors"};
  app.require_subcommand(1);

  GenerateArgs gen_args;
  auto* gen = app.add_subcommand("generate", "write a synthetic task suite");
  gen->add_option("--k", gen_args.k, "cluster count");
  gen->add_option("--points-per-cluster", gen_args.points_per_cluster,
                  "points per cluster");
  gen->add_option("--dim", gen_args.dim, "feature dimensions");
  gen->add_option("--dmin", gen_args.d_min, "minimum center distance");
  gen->add_option("--dmax", gen_args.d_max, "maximum center distance");
  gen->add_option("--tasks", gen_args.tasks, "number of tasks");
  gen->add_option("--seed", gen_args.seed, "suite seed");
  gen->add_option("--out", gen_args.out, "output directory")->required();

  SubsampleArgs sub_args;
  auto* sub = app.add_subcommand("subsample",
                                 "draw balanced task suites from a labeled CSV");
  sub->add_option("--csv", sub_args.csv, "dataset file")->required();
  sub->add_option("--features", sub_args.features, "feature column names")
      ->required()
      ->expected(-1);
  sub->add_option("--label", sub_args.label, "label column name")->required();
  sub->add_option("--k", sub_args.k, "classes per task");
  sub->add_option("--points-per-cluster", sub_args.points_per_cluster,
                  "points drawn per class");
  sub->add_option("--dims", sub_args.dims, "feature subset size (0 = all)");
  sub->add_option("--tasks", sub_args.tasks, "number of tasks");
  sub->add_option("--seed", sub_args.seed, "suite seed");
  sub->add_option("--out", sub_args.out, "output directory")->required();

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "run a solver over a suite");
  solve->add_option("--suite", solve_args.suite, "suite manifest file")->required();
  solve->add_option("--solver", solve_args.solver, "sa | exhaustive | kmeans")
      ->check(CLI::IsMember({"sa", "exhaustive", "kmeans"}));
  solve->add_option("--reads", solve_args.reads, "annealing reads per task");
  solve->add_option("--sweeps", solve_args.sweeps, "sweeps per read");
  solve->add_option("--pmin", solve_args.pmin,
                    "maxset target probability (0 = skip maxsets)");
  solve->add_option("--seed", solve_args.seed, "solver seed");
  solve->add_option("--jobs", solve_args.jobs, "parallel tasks");
  solve->add_option("--max-posterior-rows", solve_args.max_posterior_rows,
                    "posterior rows kept per task file");
  solve->add_option("--exhaustive-cap", solve_args.exhaustive_cap,
                    "partition count limit for the exhaustive solver");
  solve->add_option("--out", solve_args.out, "output directory")->required();

  EvaluateArgs eval_args;
  auto* eval = app.add_subcommand("evaluate", "metric / calibration reports");
  eval->add_option("--suite", eval_args.suite, "suite manifest file")->required();
  eval->add_option("--results", eval_args.results, "solver result directories")
      ->required()
      ->expected(-1);
  eval->add_option("--bins", eval_args.bins, "calibration bins");
  eval->add_option("--out", eval_args.out, "output directory")->required();

  PlotArgs plot_args;
  auto* plot = app.add_subcommand("plot", "render a report as SVG");
  plot->add_option("--report", plot_args.report, "report JSON file");
  plot->add_option("--kind", plot_args.kind,
                   "reliability | sparsification | maxset | scatter")
      ->required();
  plot->add_option("--task", plot_args.task, "task file (maxset/scatter kinds)");
  plot->add_option("--out", plot_args.out, "output SVG file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) return run_generate(gen_args);
    if (*sub) return run_subsample(sub_args);
    if (*solve) return run_solve(solve_args);
    if (*eval) return run_evaluate(eval_args);
    if (*plot) return run_plot(plot_args);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
