#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sched/core.hpp"
#include "sched/factor.hpp"
#include "sched/oracle.hpp"

namespace sched::online {

/// What an online machine-minimization algorithm did at one step.
struct StepOutcome {
  Step t = 0;
  std::int64_t off = 0;       // OFF(t) as known to the algorithm
  std::int64_t machines = 0;  // m(t), machines open at t
  std::vector<JobId> scheduled;
  std::vector<JobId> missed;
};

/// Per-step interface shared by online algorithms and the adversary game.
/// Steps are presented consecutively from 0; decisions are irrevocable.
class OnlineMinimizer {
 public:
  virtual ~OnlineMinimizer() = default;
  virtual StepOutcome step(Step t, std::span<const UnitJob> released) = 0;
  /// Ends the run: every job still pending has missed its deadline.
  virtual std::vector<JobId> close() = 0;
  virtual std::string name() const = 0;
};

/// EDF on ceil(alpha * OFF(t)) machines; alpha = e is the e-competitive rule.
class AlphaEdf final : public OnlineMinimizer {
 public:
  explicit AlphaEdf(Factor alpha) : alpha_(alpha) {}

  StepOutcome step(Step t, std::span<const UnitJob> released) override;
  std::string name() const override { return "alpha-edf(" + alpha_.to_string() + ")"; }

  std::vector<JobId> close() override;

  const Factor& alpha() const { return alpha_; }
  std::size_t pending() const { return pending_.size(); }
  Step next_step() const { return next_; }

 private:
  using Key = std::pair<Step, JobId>;  // (deadline, id)

  Factor alpha_;
  oracle::OffTracker tracker_;
  std::priority_queue<Key, std::vector<Key>, std::greater<>> pending_;
  Step next_ = 0;
};

struct StepRecord {
  Step t = 0;
  std::vector<JobId> released;
  std::int64_t off = 0;
  std::int64_t machines = 0;
  std::vector<JobId> scheduled;
};

struct Transcript {
  Factor alpha = Factor::euler();
  std::vector<StepRecord> steps;
  MachineProfile profile;
  Schedule schedule;
  std::vector<JobId> misses;
  std::vector<std::int64_t> off_series;  // OFF(t) for every simulated step
  std::int64_t off_final = 0;
  std::int64_t cost = 0;       // max_t m(t)
  std::int64_t busy_peak = 0;  // max_t jobs actually run at t

  bool feasible() const { return misses.empty(); }
};

/// Drives AlphaEdf over steps 0..max deadline - 1.
Transcript run_alpha_edf(std::span<const UnitJob> jobs, Factor alpha);
Transcript run_alpha_edf(const Instance& instance, Factor alpha);

nlohmann::json transcript_to_json(const Transcript& transcript);
Transcript transcript_from_json(const nlohmann::json& doc);

}  // namespace sched::online
