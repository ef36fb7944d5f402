#pragma once
// QUBO samplers. sample_sa runs independent annealing reads with a geometric
// inverse-temperature ramp; enumerate_exhaustive walks every distinct feasible
// partition. Both return SampleSets, and both satisfy the backend contract a
// remote sampler client would implement.
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "bkm/qubo.hpp"
#include "bkm/task.hpp"

namespace bkm {

struct AnnealSchedule {
  int sweeps = 30;
  double beta_min = 0.0;  // 0 = derive from the problem, see resolve_schedule
  double beta_max = 0.0;
  std::int64_t reads = 5000;
};

struct SampleEntry {
  BitVec z;
  double energy = 0.0;
  std::int64_t count = 0;
};

struct SampleSet {
  std::vector<SampleEntry> entries;  // deduplicated, sorted by bit vector
  std::string backend;
  std::int64_t reads = 0;
  int sweeps = 0;
  double beta_min = 0.0;
  double beta_max = 0.0;
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;  // informational only, never serialized

  std::int64_t total_count() const;
  double min_energy() const;  // throws std::runtime_error when empty
};

/// Concrete (beta_min, beta_max) for a problem. Explicit positive values pass
/// through; zeros are filled from a seeded pre-pass over random single-bit
/// flips: beta_min targets ~0.9 acceptance of the mean uphill move, beta_max
/// is 10 / median nonzero |dE|.
std::pair<double, double> resolve_schedule(const QuboProblem& p,
                                           const AnnealSchedule& sched,
                                           std::uint64_t seed);

/// `reads` independent runs of `sweeps` full Metropolis sweeps (sequential
/// single-bit-flip proposals over all variables), beta ramped geometrically.
/// Bit-for-bit deterministic in (problem, schedule, seed): each read draws its
/// RNG stream from (seed, read index), so the result does not depend on jobs.
SampleSet sample_sa(const QuboProblem& p, const AnnealSchedule& sched,
                    std::uint64_t seed, int jobs = 1);

struct resource_limit_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One entry per distinct partition (count = 1), energies exact. Throws
/// resource_limit_error when the partition count exceeds `cap`.
SampleSet enumerate_exhaustive(const ClusteringTask& t, const QuboProblem& p,
                               std::uint64_t cap = 10'000'000);

struct SamplerParams {
  AnnealSchedule schedule;
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct backend_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Contract every sampling backend implements. Callers re-verify reported
/// energies locally on receipt (verify_sample_set).
class SamplerBackend {
 public:
  virtual ~SamplerBackend() = default;
  virtual std::string name() const = 0;
  virtual SampleSet submit(const QuboProblem& p, const SamplerParams& params) = 0;
};

class SaBackend final : public SamplerBackend {
 public:
  std::string name() const override { return "sa"; }
  SampleSet submit(const QuboProblem& p, const SamplerParams& params) override;
};

class ExhaustiveBackend final : public SamplerBackend {
 public:
  explicit ExhaustiveBackend(ClusteringTask task, std::uint64_t cap = 10'000'000)
      : task_(std::move(task)), cap_(cap) {}
  std::string name() const override { return "exhaustive"; }
  SampleSet submit(const QuboProblem& p, const SamplerParams& params) override;

 private:
  ClusteringTask task_;
  std::uint64_t cap_;
};

/// Recomputes every entry's energy; throws backend_error on drift > tol or on
/// malformed entries (wrong length, nonpositive count).
void verify_sample_set(const QuboProblem& p, const SampleSet& s,
                       double tol = 1e-9);

/// Wire format: {"backend", "reads", "sweeps", "seed", "entries":
/// [{"z": "0101...", "energy", "count"}]}. Bit string index 0 = variable 0.
nlohmann::ordered_json sample_set_to_json(const SampleSet& s);
SampleSet sample_set_from_json(const nlohmann::json& j);

}  // namespace bkm
