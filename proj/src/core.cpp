#include "sched/core.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace sched {

std::string_view to_string(Model model) {
  switch (model) {
    case Model::UnitMin: return "unit-min";
    case Model::EqualDeadline: return "equal-deadline";
    case Model::Throughput: return "throughput";
  }
  return "unknown";
}

std::optional<Model> parse_model(std::string_view text) {
  if (text == "unit-min") return Model::UnitMin;
  if (text == "equal-deadline") return Model::EqualDeadline;
  if (text == "throughput") return Model::Throughput;
  return std::nullopt;
}

bool ValidationReport::has(std::string_view rule) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.rule == rule; });
}

bool is_integral(const Rational& x) { return x.denominator() == 1; }

std::int64_t floor_int(const Rational& x) {
  const auto q = x.numerator() / x.denominator();
  return (x.numerator() % x.denominator() != 0 && x.numerator() < 0) ? q - 1 : q;
}

std::int64_t ceil_int(const Rational& x) {
  const auto q = x.numerator() / x.denominator();
  return (x.numerator() % x.denominator() != 0 && x.numerator() > 0) ? q + 1 : q;
}

double to_double(const Rational& x) {
  return static_cast<double>(x.numerator()) / static_cast<double>(x.denominator());
}

bool is_dyadic(const Rational& x) {
  const auto den = x.denominator();
  return (den & (den - 1)) == 0;
}

namespace {

bool is_power_of_two_minus_one(std::int64_t d) {
  if (d < 1) return false;
  const auto next = d + 1;
  return (next & (next - 1)) == 0;
}

void add(ValidationReport& report, std::optional<JobId> job, std::string rule,
         std::string detail = {}) {
  report.violations.push_back({job, std::move(rule), std::move(detail)});
}

}  // namespace

ValidationReport validate_instance(const Instance& instance) {
  ValidationReport report;
  std::unordered_set<JobId> seen;
  const bool unit = instance.model != Model::EqualDeadline;

  for (const auto& job : instance.jobs) {
    if (job.id < 0) add(report, job.id, "NegativeId");
    if (!seen.insert(job.id).second) add(report, job.id, "DuplicateId");
    if (job.release < 0) add(report, job.id, "NegativeRelease");
    if (job.length <= 0) add(report, job.id, "NonPositiveLength");
    if (job.weight < 0) add(report, job.id, "NegativeWeight");
    if (job.deadline <= 0) add(report, job.id, "NonPositiveDeadline");
    if (job.release + job.length > job.deadline) add(report, job.id, "WindowTooSmall");
    if (unit) {
      if (job.length != 1) add(report, job.id, "NonUnitLength");
      if (!is_integral(job.release) || !is_integral(job.deadline))
        add(report, job.id, "NonIntegralTime");
    }
  }

  const bool sorted = std::is_sorted(
      instance.jobs.begin(), instance.jobs.end(), [](const Job& a, const Job& b) {
        return a.release != b.release ? a.release < b.release : a.id < b.id;
      });
  if (!sorted) add(report, std::nullopt, "UnsortedJobs");

  if (instance.model == Model::Throughput) {
    if (!instance.machines) {
      add(report, std::nullopt, "MissingMachineCount");
    } else if (*instance.machines < 1) {
      add(report, std::nullopt, "NonPositiveMachineCount");
    }
  }

  if (unit && instance.horizon) {
    for (const auto& job : instance.jobs) {
      if (job.deadline > *instance.horizon) {
        add(report, job.id, "BeyondHorizon");
      }
    }
  }

  if (instance.model == Model::EqualDeadline) {
    std::optional<Rational> common;
    if (instance.common_deadline) common = Rational(*instance.common_deadline);
    for (const auto& job : instance.jobs) {
      if (!common) common = job.deadline;
      if (job.deadline != *common) add(report, job.id, "UnequalDeadline");
    }
    if (!common) {
      add(report, std::nullopt, "MissingCommonDeadline");
    } else if (!is_integral(*common) || !is_power_of_two_minus_one(common->numerator())) {
      add(report, std::nullopt, "BadCommonDeadline", "deadline must be 2^kappa - 1");
    }
  }
  return report;
}

void normalize(Instance& instance) {
  std::sort(instance.jobs.begin(), instance.jobs.end(), [](const Job& a, const Job& b) {
    return a.release != b.release ? a.release < b.release : a.id < b.id;
  });
}

bool feasible_slot(const UnitJob& job, Step t) {
  return job.release <= t && t + 1 <= job.deadline;
}

bool feasible_slot(const Job& job, Step t) { return feasible_slot(to_unit(job), t); }

UnitJob to_unit(const Job& job) {
  if (job.length != 1 || !is_integral(job.release) || !is_integral(job.deadline)) {
    throw ContractViolation("job " + std::to_string(job.id) + " is not a unit job");
  }
  return {job.id, job.release.numerator(), job.deadline.numerator(), job.weight};
}

Job to_job(const UnitJob& job) {
  return {job.id, Rational(job.release), Rational(job.deadline), Rational(1), job.weight};
}

std::vector<UnitJob> to_unit_jobs(std::span<const Job> jobs) {
  std::vector<UnitJob> out;
  out.reserve(jobs.size());
  for (const auto& job : jobs) out.push_back(to_unit(job));
  return out;
}

std::vector<Job> to_jobs(std::span<const UnitJob> jobs) {
  std::vector<Job> out;
  out.reserve(jobs.size());
  for (const auto& job : jobs) out.push_back(to_job(job));
  return out;
}

std::int64_t schedule_cost(const Schedule& schedule) {
  std::map<MachineId, std::vector<std::pair<Rational, Rational>>> per_machine;
  std::vector<std::pair<Rational, int>> events;
  events.reserve(schedule.assignments.size() * 2);
  for (const auto& a : schedule.assignments) {
    per_machine[a.machine].emplace_back(a.start, a.end);
    events.emplace_back(a.start, +1);
    events.emplace_back(a.end, -1);
  }
  for (auto& [machine, intervals] : per_machine) {
    std::sort(intervals.begin(), intervals.end());
    for (std::size_t i = 1; i < intervals.size(); ++i) {
      if (intervals[i].first < intervals[i - 1].second) {
        throw ContractViolation("overlapping assignments on machine " +
                                std::to_string(machine));
      }
    }
  }
  // Ends sort before starts at equal times: intervals are half-open.
  std::sort(events.begin(), events.end());
  std::int64_t busy = 0;
  std::int64_t peak = 0;
  for (const auto& [time, delta] : events) {
    busy += delta;
    peak = std::max(peak, busy);
  }
  return peak;
}

ValidationReport audit_schedule(const Instance& instance, const Schedule& schedule) {
  ValidationReport report;
  std::unordered_map<JobId, const Job*> by_id;
  for (const auto& job : instance.jobs) by_id.emplace(job.id, &job);

  std::unordered_map<JobId, int> times_assigned;
  std::map<MachineId, std::vector<std::pair<Rational, Rational>>> per_machine;
  for (const auto& a : schedule.assignments) {
    const auto it = by_id.find(a.job);
    if (it == by_id.end()) {
      add(report, a.job, "UnknownJob");
      continue;
    }
    const Job& job = *it->second;
    ++times_assigned[a.job];
    if (a.machine < 0) add(report, a.job, "NegativeMachine");
    if (instance.model == Model::Throughput && instance.machines &&
        a.machine >= *instance.machines) {
      add(report, a.job, "MachineOutOfRange");
    }
    if (a.start < job.release) add(report, a.job, "StartsBeforeRelease");
    if (a.end > job.deadline) add(report, a.job, "MissesDeadline");
    if (a.end - a.start != job.length) add(report, a.job, "WrongLength");
    per_machine[a.machine].emplace_back(a.start, a.end);
  }
  for (auto& [machine, intervals] : per_machine) {
    std::sort(intervals.begin(), intervals.end());
    for (std::size_t i = 1; i < intervals.size(); ++i) {
      if (intervals[i].first < intervals[i - 1].second) {
        add(report, std::nullopt, "Overlap", "machine " + std::to_string(machine));
      }
    }
  }

  std::unordered_set<JobId> missed(schedule.misses.begin(), schedule.misses.end());
  for (const auto& [id, count] : times_assigned) {
    if (count > 1) add(report, id, "DuplicateAssignment");
    if (missed.count(id) != 0) add(report, id, "AssignedAndMissed");
  }
  if (instance.model != Model::Throughput) {
    for (const auto& job : instance.jobs) {
      if (times_assigned.count(job.id) == 0 && missed.count(job.id) == 0) {
        add(report, job.id, "Unaccounted");
      }
    }
  }
  return report;
}

void MachineProfile::set(Step t, std::int64_t m) {
  if (t < 0) throw ContractViolation("negative step in machine profile");
  if (t >= horizon()) counts_.resize(static_cast<std::size_t>(t) + 1, 0);
  counts_[static_cast<std::size_t>(t)] = m;
}

std::int64_t MachineProfile::max() const {
  return counts_.empty() ? 0 : *std::max_element(counts_.begin(), counts_.end());
}

}  // namespace sched
