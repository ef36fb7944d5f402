#include "bkm/sampler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <thread>

#include "bkm/rng.hpp"

namespace bkm {

std::int64_t SampleSet::total_count() const {
  std::int64_t total = 0;
  for (const auto& e : entries) total += e.count;
  return total;
}

double SampleSet::min_energy() const {
  if (entries.empty()) throw std::runtime_error("min_energy: empty sample set");
  double best = entries.front().energy;
  for (const auto& e : entries) best = std::min(best, e.energy);
  return best;
}

std::pair<double, double> resolve_schedule(const QuboProblem& p,
                                           const AnnealSchedule& sched,
                                           std::uint64_t seed) {
  if (sched.beta_min > 0.0 && sched.beta_max > 0.0) {
    if (!(sched.beta_min < sched.beta_max))
      throw std::invalid_argument("schedule: beta_min must be < beta_max");
    return {sched.beta_min, sched.beta_max};
  }
  const int n = p.n();
  Rng rng(derive_seed(seed, 0xbe7aULL));
  std::vector<double> abs_deltas;
  double uphill_sum = 0.0;
  int uphill_count = 0;
  const int n_states = 64;
  for (int s = 0; s < n_states; ++s) {
    BitVec z(n);
    for (int i = 0; i < n; ++i) z[i] = rng.bernoulli(0.5) ? 1 : 0;
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
      if (z[i]) g += p.q.col(i);
    }
    for (int f = 0; f < 8; ++f) {
      const int i = static_cast<int>(rng.uniform_below(n));
      const double delta = qubo_flip_delta(p, z, g, i);
      if (delta != 0.0) abs_deltas.push_back(std::abs(delta));
      if (delta > 0.0) {
        uphill_sum += delta;
        ++uphill_count;
      }
    }
  }
  double beta_min = 0.1;
  double beta_max = 1.0;
  if (uphill_count > 0) {
    beta_min = -std::log(0.9) / (uphill_sum / uphill_count);
  }
  if (!abs_deltas.empty()) {
    std::sort(abs_deltas.begin(), abs_deltas.end());
    const double median = abs_deltas[abs_deltas.size() / 2];
    beta_max = 10.0 / median;
  }
  if (!(beta_max > beta_min)) beta_max = 2.0 * beta_min;
  if (sched.beta_min > 0.0) beta_min = sched.beta_min;
  if (sched.beta_max > 0.0) beta_max = sched.beta_max;
  if (!(beta_min < beta_max)) beta_min = beta_max / 2.0;
  return {beta_min, beta_max};
}

namespace {

// One annealing read: random start, `sweeps` sequential Metropolis sweeps.
BitVec anneal_read(const QuboProblem& p, int sweeps, double beta_min,
                   double beta_max, std::uint64_t read_seed) {
  const int n = p.n();
  Rng rng(read_seed);
  BitVec z(n);
  for (int i = 0; i < n; ++i) z[i] = rng.bernoulli(0.5) ? 1 : 0;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (z[i]) g += p.q.col(i);
  }
  const double ratio = beta_max / beta_min;
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    const double frac =
        sweeps > 1 ? static_cast<double>(sweep) / (sweeps - 1) : 1.0;
    const double beta = beta_min * std::pow(ratio, frac);
    for (int i = 0; i < n; ++i) {
      const double delta = qubo_flip_delta(p, z, g, i);
      if (delta <= 0.0 || rng.uniform() < std::exp(-beta * delta)) {
        const double sign = z[i] ? -1.0 : 1.0;
        z[i] ^= 1;
        g += sign * p.q.col(i);
      }
    }
  }
  return z;
}

void merge_reads(std::map<BitVec, std::int64_t>& acc,
                 const std::map<BitVec, std::int64_t>& part) {
  for (const auto& [z, c] : part) acc[z] += c;
}

}  // namespace

SampleSet sample_sa(const QuboProblem& p, const AnnealSchedule& sched,
                    std::uint64_t seed, int jobs) {
  if (sched.reads < 1) throw std::invalid_argument("sample_sa: reads must be >= 1");
  if (sched.sweeps < 1) throw std::invalid_argument("sample_sa: sweeps must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  const auto resolved = resolve_schedule(p, sched, seed);
  const double beta_min = resolved.first;
  const double beta_max = resolved.second;

  const int n_jobs = std::max(1, jobs);
  std::vector<std::map<BitVec, std::int64_t>> partials(n_jobs);
  auto run_range = [&](int job, std::int64_t lo, std::int64_t hi) {
    auto& local = partials[job];
    for (std::int64_t read = lo; read < hi; ++read) {
      const BitVec z = anneal_read(p, sched.sweeps, beta_min, beta_max,
                                   derive_seed(seed, static_cast<std::uint64_t>(read)));
      ++local[z];
    }
  };
  if (n_jobs == 1) {
    run_range(0, 0, sched.reads);
  } else {
    std::vector<std::thread> workers;
    const std::int64_t chunk = (sched.reads + n_jobs - 1) / n_jobs;
    for (int j = 0; j < n_jobs; ++j) {
      const std::int64_t lo = j * chunk;
      const std::int64_t hi = std::min<std::int64_t>(sched.reads, lo + chunk);
      if (lo >= hi) break;
      workers.emplace_back(run_range, j, lo, hi);
    }
    for (auto& w : workers) w.join();
  }
  std::map<BitVec, std::int64_t> merged;
  for (const auto& part : partials) merge_reads(merged, part);

  SampleSet out;
  out.backend = "sa";
  out.reads = sched.reads;
  out.sweeps = sched.sweeps;
  out.beta_min = beta_min;
  out.beta_max = beta_max;
  out.seed = seed;
  out.entries.reserve(merged.size());
  for (const auto& [z, count] : merged) {
    out.entries.push_back({z, qubo_energy(p, z), count});
  }
  out.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return out;
}

namespace {

// Depth-first walk over distinct partitions. Equal-size clusters are
// interchangeable, so an empty cluster may be opened only if it is the
// lowest-indexed empty cluster of its target size.
struct PartitionWalker {
  const ClusteringTask& task;
  std::vector<std::vector<double>> dist2;  // pairwise squared distances
  std::vector<int> remaining;
  std::vector<std::vector<int>> members;
  std::vector<int> labels;
  std::vector<SampleEntry>* out;

  void run() {
    labels.assign(task.num_points(), -1);
    descend(0, 0.0);
  }

  void descend(int point, double energy) {
    const int n_points = task.num_points();
    if (point == n_points) {
      Assignment a;
      a.labels = labels;
      out->push_back({vectorize(a, task), energy, 1});
      return;
    }
    for (int k = 0; k < task.k; ++k) {
      if (remaining[k] == 0) continue;
      if (members[k].empty()) {
        bool lowest_empty_of_size = true;
        for (int k2 = 0; k2 < k; ++k2) {
          if (members[k2].empty() && task.sizes[k2] == task.sizes[k]) {
            lowest_empty_of_size = false;
            break;
          }
        }
        if (!lowest_empty_of_size) continue;
      }
      // Joining cluster k adds the pair costs against its current members.
      double delta = 0.0;
      for (int j : members[k]) delta += dist2[point][j];
      delta /= 2.0 * task.sizes[k];
      labels[point] = k;
      members[k].push_back(point);
      --remaining[k];
      descend(point + 1, energy + delta);
      ++remaining[k];
      members[k].pop_back();
      labels[point] = -1;
    }
  }
};

}  // namespace

SampleSet enumerate_exhaustive(const ClusteringTask& t, const QuboProblem& p,
                               std::uint64_t cap) {
  t.validate();
  if (p.n() != t.num_vars())
    throw std::invalid_argument("enumerate_exhaustive: problem size != K*I");
  const std::uint64_t count = partition_count(t);
  if (count > cap)
    throw resource_limit_error("enumerate_exhaustive: " + std::to_string(count) +
                               " partitions exceed cap " + std::to_string(cap));
  const auto t0 = std::chrono::steady_clock::now();
  const int n_points = t.num_points();
  PartitionWalker walker{t, {}, t.sizes, {}, {}, nullptr};
  walker.dist2.assign(n_points, std::vector<double>(n_points, 0.0));
  for (int i = 0; i < n_points; ++i) {
    for (int j = i + 1; j < n_points; ++j) {
      const double d2 = (t.points.row(i) - t.points.row(j)).squaredNorm();
      walker.dist2[i][j] = d2;
      walker.dist2[j][i] = d2;
    }
  }
  walker.members.resize(t.k);

  SampleSet out;
  out.backend = "exhaustive";
  out.entries.reserve(count);
  walker.out = &out.entries;
  walker.run();
  std::sort(out.entries.begin(), out.entries.end(),
            [](const SampleEntry& a, const SampleEntry& b) { return a.z < b.z; });
  out.reads = static_cast<std::int64_t>(out.entries.size());
  out.sweeps = 0;
  out.seed = 0;
  out.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return out;
}

SampleSet SaBackend::submit(const QuboProblem& p, const SamplerParams& params) {
  return sample_sa(p, params.schedule, params.seed, params.jobs);
}

SampleSet ExhaustiveBackend::submit(const QuboProblem& p,
                                    const SamplerParams& params) {
  (void)params;
  return enumerate_exhaustive(task_, p, cap_);
}

void verify_sample_set(const QuboProblem& p, const SampleSet& s, double tol) {
  for (const auto& e : s.entries) {
    if (static_cast<int>(e.z.size()) != p.n())
      throw backend_error("sample set entry has wrong vector length");
    if (e.count < 1) throw backend_error("sample set entry has count < 1");
    const double expected = qubo_energy(p, e.z);
    if (std::abs(expected - e.energy) > tol)
      throw backend_error("sample set energy drifts from local evaluation by " +
                          std::to_string(std::abs(expected - e.energy)));
  }
}

nlohmann::ordered_json sample_set_to_json(const SampleSet& s) {
  nlohmann::ordered_json j;
  j["backend"] = s.backend;
  j["reads"] = s.reads;
  j["sweeps"] = s.sweeps;
  j["seed"] = s.seed;
  auto entries = nlohmann::ordered_json::array();
  for (const auto& e : s.entries) {
    std::string bits(e.z.size(), '0');
    for (std::size_t i = 0; i < e.z.size(); ++i) {
      if (e.z[i]) bits[i] = '1';
    }
    entries.push_back({{"z", bits}, {"energy", e.energy}, {"count", e.count}});
  }
  j["entries"] = std::move(entries);
  return j;
}

SampleSet sample_set_from_json(const nlohmann::json& j) {
  SampleSet s;
  try {
    s.backend = j.at("backend").get<std::string>();
    s.reads = j.at("reads").get<std::int64_t>();
    s.sweeps = j.at("sweeps").get<int>();
    s.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& ej : j.at("entries")) {
      SampleEntry e;
      const std::string bits = ej.at("z").get<std::string>();
      e.z.resize(bits.size());
      for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] != '0' && bits[i] != '1')
          throw backend_error("sample set bit string has non-binary character");
        e.z[i] = bits[i] == '1' ? 1 : 0;
      }
      e.energy = ej.at("energy").get<double>();
      e.count = ej.at("count").get<std::int64_t>();
      s.entries.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw backend_error(std::string("malformed sample set response: ") +
                        ex.what());
  }
  return s;
}

}  // namespace bkm
