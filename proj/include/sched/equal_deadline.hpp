#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sched/core.hpp"

namespace sched::equal_deadline {

struct PhaseBounds {
  Rational start;   // a_i = (d + 1)(1 - 2^(1 - i))
  Rational end;     // b_i = a_i + l_i
  Rational length;  // l_i = 2^(kappa - i)
};

/// Phase i of kappa, 1-based. Phases partition [0, 2^kappa - 1].
PhaseBounds phase_bounds(int kappa, int i);

/// kappa with d = 2^kappa - 1; throws ContractViolation otherwise.
int kappa_of(std::int64_t common_deadline);

enum class JobClass { Short, Long };
std::string_view to_string(JobClass c);

/// Short iff size <= phase_length / 4.
JobClass classify(const Rational& size, const Rational& phase_length);

enum class Pool { Closed, Short, Long };

struct PhaseRecord {
  int index = 0;
  PhaseBounds bounds;
  std::int64_t m_short = 0;  // per-phase maximum of the short pool
  std::int64_t m_long = 0;   // per-phase maximum of the long pool
  std::int64_t opened = 0;
  std::int64_t closed = 0;
};

struct Placement {
  JobId id = 0;
  MachineId machine = 0;
  Rational start{0};
  Rational end{0};
  JobClass class_at_release = JobClass::Short;
};

enum class ReleaseAction { OpenedLong, Postponed, PlacedShort };

/// Online phase algorithm for a common deadline d = 2^kappa - 1. Jobs must be
/// presented in nondecreasing release order; phase boundaries are crossed
/// lazily when a later release (or finish) arrives.
class PhaseScheduler {
 public:
  explicit PhaseScheduler(std::int64_t common_deadline);

  ReleaseAction on_release(const Job& job);
  /// Advances to phase i: closes idle machines, re-partitions pools against
  /// l_i / 4, and places the postponed short jobs of phase i - 1.
  void on_phase_start(int i);
  /// Runs the remaining phase boundaries.
  void finish();

  int kappa() const { return kappa_; }
  int phase() const { return phase_; }
  std::int64_t pool_size(Pool pool) const;
  std::span<const PhaseRecord> phases() const { return phases_; }
  std::span<const Placement> placements() const { return placements_; }
  std::span<const std::string> audit_failures() const { return audit_failures_; }
  std::size_t postponed() const { return postponed_.size(); }

 private:
  struct Machine {
    MachineId id;
    Rational busy_until;
    Pool pool;
  };

  MachineId open_machine(Pool pool, const Rational& now);
  /// First short-pool machine (by id) that finishes job by `limit` when
  /// starting no earlier than `not_before`; opens one if none fits.
  void place_short(const Job& job, const Rational& not_before, const Rational& limit,
                   JobClass class_at_release);
  void check_half_busy(const Rational& phase_end, const Rational& phase_length);
  void refresh_maxima();
  PhaseRecord& current() { return phases_[static_cast<std::size_t>(phase_ - 1)]; }

  std::int64_t deadline_;
  int kappa_;
  int phase_ = 1;
  Rational last_release_{0};
  std::vector<Machine> machines_;
  std::vector<Job> postponed_;
  std::vector<PhaseRecord> phases_;
  std::vector<Placement> placements_;
  std::vector<std::string> audit_failures_;
};

struct Transcript {
  std::int64_t common_deadline = 0;
  int kappa = 0;
  std::vector<PhaseRecord> phases;
  std::vector<Placement> placements;
  Schedule schedule;
  std::int64_t lower_bound = 0;  // volume bound on OFF
  std::int64_t max_concurrent = 0;
  std::vector<std::string> audit_failures;

  bool short_bound_holds() const;  // M_short(i) <= 8 LB + 1 for all i
  bool long_bound_holds() const;   // M_long(i) <= 8 LB for all i
  bool concurrency_bound_holds() const { return max_concurrent <= 16 * lower_bound + 1; }
  bool bounds_hold() const {
    return short_bound_holds() && long_bound_holds() && concurrency_bound_holds();
  }
};

Transcript run_equal_deadline(const Instance& instance);

nlohmann::json transcript_to_json(const Transcript& transcript);

}  // namespace sched::equal_deadline
