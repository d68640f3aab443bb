#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "sched/core.hpp"

namespace sched::oracle {

struct FirstMiss {
  JobId job;
  Step deadline;  // the step at which the job became unschedulable
};

/// Step-by-step record of an EDF run. S(t) is the set of jobs scheduled in
/// steps 0..t-1.
struct EdfTrace {
  std::vector<std::vector<JobId>> chosen;  // indexed by step
  std::unordered_map<JobId, Step> slot_of;
  std::vector<JobId> misses;
  std::optional<FirstMiss> first_miss;

  Step horizon() const { return static_cast<Step>(chosen.size()); }
  bool feasible() const { return misses.empty(); }
  /// |S(t)|: jobs scheduled strictly before step t.
  std::int64_t scheduled_before(Step t) const;
};

struct EdfResult {
  EdfTrace trace;
  Schedule schedule;
};

/// Runs EDF with m(t) machines at step t. Ties on deadline break by job id;
/// at step t the chosen jobs occupy machines 0..|chosen|-1 in EDF order.
EdfResult edf_simulate(std::span<const UnitJob> jobs, const MachineProfile& profile);

/// Jobs aggregated by (release, deadline) window.
struct Demand {
  Step release;
  Step deadline;
  std::int64_t count;
};

/// Groups jobs by window, sorted by release then deadline.
std::vector<Demand> group_by_window(std::span<const UnitJob> jobs);

/// EDF feasibility with a constant m, evaluated in bulk over grouped demands.
/// Runs in O(G log G) independent of the horizon length.
bool edf_feasible(std::span<const Demand> demands, std::int64_t machines);

/// Max-flow feasibility of {j : d_j <= d} against slot capacities m(t).
bool flow_feasible(std::span<const UnitJob> jobs, const MachineProfile& profile, Step d);

/// Exhaustive search; refuses instances above 8 jobs or a 6-slot span.
bool brute_force_feasible(std::span<const UnitJob> jobs, const MachineProfile& profile);

/// Smallest constant machine count for which EDF has no miss (0 if empty).
std::int64_t off_unit(std::span<const UnitJob> jobs);

/// Incremental OFF for a growing job set; each query warm-starts from the
/// previous optimum, which is a valid lower bound since OFF only grows.
class OffTracker {
 public:
  void add(const UnitJob& job) { add(job.release, job.deadline, 1); }
  void add(Step release, Step deadline, std::int64_t count);
  std::int64_t off();
  std::int64_t job_count() const { return total_; }

 private:
  std::map<std::pair<Step, Step>, std::int64_t> windows_;
  std::vector<Demand> scratch_;
  std::int64_t total_ = 0;
  std::int64_t last_ = 0;
  bool dirty_ = false;
};

/// OFF(t) for t = 0..max release, where OFF(t) covers {j : r_j <= t}.
std::vector<std::int64_t> off_prefix_series(std::span<const UnitJob> jobs);

/// max over r in {0} u releases of ceil(volume released at or after r / (d - r)),
/// and at least 1 when any job exists.
std::int64_t volume_lower_bound(std::span<const Job> jobs, const Rational& deadline);

struct ThroughputOptimum {
  Rational weight{0};
  Schedule schedule;
};

/// Exact maximum-weight schedule of unit jobs on k machines (min-cost flow).
ThroughputOptimum offline_throughput_opt(const Instance& instance);

}  // namespace sched::oracle
