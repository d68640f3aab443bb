#include "sched/equal_deadline.hpp"

#include <algorithm>

#include "sched/instance_io.hpp"
#include "sched/oracle.hpp"

namespace sched::equal_deadline {

PhaseBounds phase_bounds(int kappa, int i) {
  if (kappa < 1 || kappa > 62) throw ContractViolation("kappa out of range");
  if (i < 1 || i > kappa) {
    throw ContractViolation("phase " + std::to_string(i) + " outside [1, " +
                            std::to_string(kappa) + "]");
  }
  const std::int64_t horizon = std::int64_t{1} << kappa;  // d + 1
  const Rational length(horizon >> i);
  const Rational start = Rational(horizon) - Rational(horizon >> (i - 1));
  return {start, start + length, length};
}

int kappa_of(std::int64_t common_deadline) {
  const auto next = common_deadline + 1;
  if (common_deadline < 1 || (next & (next - 1)) != 0) {
    throw ContractViolation("common deadline must be 2^kappa - 1");
  }
  int kappa = 0;
  while ((std::int64_t{1} << kappa) < next) ++kappa;
  return kappa;
}

std::string_view to_string(JobClass c) { return c == JobClass::Short ? "short" : "long"; }

JobClass classify(const Rational& size, const Rational& phase_length) {
  return size <= phase_length / 4 ? JobClass::Short : JobClass::Long;
}

PhaseScheduler::PhaseScheduler(std::int64_t common_deadline)
    : deadline_(common_deadline), kappa_(kappa_of(common_deadline)) {
  for (int i = 1; i <= kappa_; ++i) phases_.push_back({i, phase_bounds(kappa_, i), 0, 0, 0, 0});
}

std::int64_t PhaseScheduler::pool_size(Pool pool) const {
  return std::count_if(machines_.begin(), machines_.end(),
                       [&](const Machine& m) { return m.pool == pool; });
}

void PhaseScheduler::refresh_maxima() {
  auto& record = current();
  record.m_short = std::max(record.m_short, pool_size(Pool::Short));
  record.m_long = std::max(record.m_long, pool_size(Pool::Long));
}

MachineId PhaseScheduler::open_machine(Pool pool, const Rational& now) {
  ++current().opened;
  for (auto& machine : machines_) {
    if (machine.pool == Pool::Closed) {
      machine.pool = pool;
      machine.busy_until = std::max(machine.busy_until, now);
      return machine.id;
    }
  }
  const auto id = static_cast<MachineId>(machines_.size());
  machines_.push_back({id, now, pool});
  return id;
}

void PhaseScheduler::check_half_busy(const Rational& phase_end, const Rational& phase_length) {
  const Rational floor = phase_end - phase_length / 2;
  for (const auto& machine : machines_) {
    if (machine.pool == Pool::Short && machine.busy_until < floor) {
      audit_failures_.push_back("phase " + std::to_string(phase_) + ": short machine " +
                                std::to_string(machine.id) + " idle from " +
                                format_rational(machine.busy_until) +
                                " when a new short machine was opened");
    }
  }
}

void PhaseScheduler::place_short(const Job& job, const Rational& not_before,
                                 const Rational& limit, JobClass class_at_release) {
  for (auto& machine : machines_) {
    if (machine.pool != Pool::Short) continue;
    const auto start = std::max(machine.busy_until, not_before);
    if (start + job.length <= limit) {
      machine.busy_until = start + job.length;
      placements_.push_back({job.id, machine.id, start, machine.busy_until, class_at_release});
      return;
    }
  }
  if (not_before + job.length > limit) {
    throw ContractViolation("short job " + std::to_string(job.id) + " cannot fit its phase");
  }
  const auto& bounds = current().bounds;
  check_half_busy(bounds.end, bounds.length);
  const auto id = open_machine(Pool::Short, not_before);
  auto& machine = machines_[static_cast<std::size_t>(id)];
  placements_.push_back({job.id, id, not_before, not_before + job.length, class_at_release});
  machine.busy_until = not_before + job.length;
}

void PhaseScheduler::on_phase_start(int i) {
  if (i != phase_ + 1 || i > kappa_) {
    throw ContractViolation("phase " + std::to_string(i) + " cannot follow phase " +
                            std::to_string(phase_));
  }
  const auto previous_end = current().bounds.end;
  for (const auto& machine : machines_) {
    if (machine.pool == Pool::Short && machine.busy_until > previous_end) {
      audit_failures_.push_back("phase " + std::to_string(phase_) + ": short machine " +
                                std::to_string(machine.id) + " busy past phase end");
    }
  }
  phase_ = i;
  auto& record = current();
  const auto& bounds = record.bounds;
  const Rational threshold = bounds.length / 4;

  for (auto& machine : machines_) {
    if (machine.pool == Pool::Closed) continue;
    if (machine.busy_until <= bounds.start) {
      machine.pool = Pool::Closed;
      ++record.closed;
    } else {
      machine.pool = machine.busy_until - bounds.start >= threshold ? Pool::Long : Pool::Short;
    }
  }

  std::sort(postponed_.begin(), postponed_.end(), [](const Job& a, const Job& b) {
    return a.length != b.length ? a.length > b.length : a.id < b.id;
  });
  for (const auto& job : postponed_) {
    if (job.length > bounds.length) {
      throw ContractViolation("postponed job " + std::to_string(job.id) + " longer than phase");
    }
    place_short(job, bounds.start, bounds.end, JobClass::Short);
  }
  postponed_.clear();
  refresh_maxima();
}

ReleaseAction PhaseScheduler::on_release(const Job& job) {
  if (job.release < last_release_) throw ContractViolation("releases must be nondecreasing");
  if (job.deadline != deadline_ || job.release + job.length > Rational(deadline_)) {
    throw ContractViolation("job " + std::to_string(job.id) + " does not fit the common deadline");
  }
  last_release_ = job.release;
  while (job.release >= current().bounds.end && phase_ < kappa_) on_phase_start(phase_ + 1);
  refresh_maxima();

  const auto& bounds = current().bounds;
  ReleaseAction action;
  if (classify(job.length, bounds.length) == JobClass::Long) {
    const auto id = open_machine(Pool::Long, job.release);
    auto& machine = machines_[static_cast<std::size_t>(id)];
    machine.busy_until = job.release + job.length;
    placements_.push_back({job.id, id, job.release, machine.busy_until, JobClass::Long});
    action = ReleaseAction::OpenedLong;
  } else if (phase_ < kappa_) {
    postponed_.push_back(job);
    action = ReleaseAction::Postponed;
  } else {
    place_short(job, job.release, Rational(deadline_), JobClass::Short);
    action = ReleaseAction::PlacedShort;
  }
  refresh_maxima();
  return action;
}

void PhaseScheduler::finish() {
  while (phase_ < kappa_) on_phase_start(phase_ + 1);
  refresh_maxima();
  if (!postponed_.empty()) throw ContractViolation("postponed jobs left after the last phase");
}

bool Transcript::short_bound_holds() const {
  return std::all_of(phases.begin(), phases.end(),
                     [&](const PhaseRecord& p) { return p.m_short <= 8 * lower_bound + 1; });
}

bool Transcript::long_bound_holds() const {
  return std::all_of(phases.begin(), phases.end(),
                     [&](const PhaseRecord& p) { return p.m_long <= 8 * lower_bound; });
}

Transcript run_equal_deadline(const Instance& instance) {
  if (instance.model != Model::EqualDeadline) {
    throw ContractViolation("run_equal_deadline needs an equal-deadline instance");
  }
  std::int64_t deadline = instance.common_deadline.value_or(0);
  if (!instance.common_deadline) {
    if (instance.jobs.empty() || !is_integral(instance.jobs.front().deadline)) {
      throw ContractViolation("equal-deadline instance without a common deadline");
    }
    deadline = instance.jobs.front().deadline.numerator();
  }

  std::vector<Job> jobs = instance.jobs;
  std::sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) {
    return a.release != b.release ? a.release < b.release : a.id < b.id;
  });

  PhaseScheduler scheduler(deadline);
  for (const auto& job : jobs) scheduler.on_release(job);
  scheduler.finish();

  Transcript transcript;
  transcript.common_deadline = deadline;
  transcript.kappa = scheduler.kappa();
  transcript.phases.assign(scheduler.phases().begin(), scheduler.phases().end());
  transcript.placements.assign(scheduler.placements().begin(), scheduler.placements().end());
  transcript.audit_failures.assign(scheduler.audit_failures().begin(),
                                   scheduler.audit_failures().end());
  std::sort(transcript.placements.begin(), transcript.placements.end(),
            [](const Placement& a, const Placement& b) { return a.id < b.id; });
  for (const auto& p : transcript.placements) {
    transcript.schedule.assignments.push_back({p.id, p.machine, p.start, p.end});
  }
  transcript.lower_bound = oracle::volume_lower_bound(jobs, Rational(deadline));
  transcript.max_concurrent = schedule_cost(transcript.schedule);
  return transcript;
}

nlohmann::json transcript_to_json(const Transcript& transcript) {
  auto phases = nlohmann::json::array();
  for (const auto& p : transcript.phases) {
    phases.push_back({{"i", p.index},
                      {"a", rational_to_json(p.bounds.start)},
                      {"b", rational_to_json(p.bounds.end)},
                      {"l", rational_to_json(p.bounds.length)},
                      {"M_short", p.m_short},
                      {"M_long", p.m_long},
                      {"opened", p.opened},
                      {"closed", p.closed}});
  }
  auto jobs = nlohmann::json::array();
  for (const auto& p : transcript.placements) {
    jobs.push_back({{"id", p.id},
                    {"machine", p.machine},
                    {"start", rational_to_json(p.start)},
                    {"end", rational_to_json(p.end)},
                    {"class", std::string(to_string(p.class_at_release))}});
  }
  return {{"algorithm", "equal-deadline"},
          {"d", transcript.common_deadline},
          {"kappa", transcript.kappa},
          {"LB", transcript.lower_bound},
          {"max_concurrent", transcript.max_concurrent},
          {"short_bound", transcript.short_bound_holds()},
          {"long_bound", transcript.long_bound_holds()},
          {"concurrency_bound", transcript.concurrency_bound_holds()},
          {"audit_failures", transcript.audit_failures},
          {"phases", std::move(phases)},
          {"jobs", std::move(jobs)}};
}

}  // namespace sched::equal_deadline
