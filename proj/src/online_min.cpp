#include "sched/online_min.hpp"

#include <algorithm>

namespace sched::online {

StepOutcome AlphaEdf::step(Step t, std::span<const UnitJob> released) {
  if (t != next_) {
    throw ContractViolation("alpha-edf expected step " + std::to_string(next_) + ", got " +
                            std::to_string(t));
  }
  ++next_;
  for (const auto& job : released) {
    if (job.release != t) {
      throw ContractViolation("job " + std::to_string(job.id) + " released at " +
                              std::to_string(job.release) + " presented at step " +
                              std::to_string(t));
    }
    tracker_.add(job);
    pending_.emplace(job.deadline, job.id);
  }

  StepOutcome outcome;
  outcome.t = t;
  outcome.off = tracker_.off();
  outcome.machines = alpha_.ceil_mul(outcome.off);
  while (!pending_.empty() && pending_.top().first <= t) {
    outcome.missed.push_back(pending_.top().second);
    pending_.pop();
  }
  while (!pending_.empty() && static_cast<std::int64_t>(outcome.scheduled.size()) < outcome.machines) {
    outcome.scheduled.push_back(pending_.top().second);
    pending_.pop();
  }
  return outcome;
}

std::vector<JobId> AlphaEdf::close() {
  std::vector<JobId> missed;
  while (!pending_.empty()) {
    missed.push_back(pending_.top().second);
    pending_.pop();
  }
  return missed;
}

Transcript run_alpha_edf(std::span<const UnitJob> jobs, Factor alpha) {
  std::vector<UnitJob> order(jobs.begin(), jobs.end());
  std::sort(order.begin(), order.end(), [](const UnitJob& a, const UnitJob& b) {
    return a.release != b.release ? a.release < b.release : a.id < b.id;
  });
  Step horizon = 0;
  for (const auto& job : order) horizon = std::max(horizon, job.deadline);

  Transcript transcript;
  transcript.alpha = alpha;
  AlphaEdf engine(alpha);
  std::size_t next = 0;
  for (Step t = 0; t < horizon; ++t) {
    const auto first = next;
    while (next < order.size() && order[next].release == t) ++next;
    const std::span<const UnitJob> released(order.data() + first, next - first);
    auto outcome = engine.step(t, released);

    StepRecord record;
    record.t = t;
    record.released.reserve(released.size());
    for (const auto& job : released) record.released.push_back(job.id);
    record.off = outcome.off;
    record.machines = outcome.machines;
    for (std::size_t i = 0; i < outcome.scheduled.size(); ++i) {
      transcript.schedule.assignments.push_back(
          {outcome.scheduled[i], static_cast<MachineId>(i), Rational(t), Rational(t + 1)});
    }
    transcript.busy_peak =
        std::max(transcript.busy_peak, static_cast<std::int64_t>(outcome.scheduled.size()));
    record.scheduled = std::move(outcome.scheduled);
    for (auto id : outcome.missed) transcript.misses.push_back(id);

    transcript.profile.set(t, record.machines);
    transcript.off_series.push_back(record.off);
    transcript.cost = std::max(transcript.cost, record.machines);
    transcript.off_final = record.off;
    transcript.steps.push_back(std::move(record));
  }
  for (auto id : engine.close()) transcript.misses.push_back(id);
  transcript.schedule.misses = transcript.misses;
  return transcript;
}

Transcript run_alpha_edf(const Instance& instance, Factor alpha) {
  const auto jobs = to_unit_jobs(instance.jobs);
  return run_alpha_edf(jobs, alpha);
}

nlohmann::json transcript_to_json(const Transcript& transcript) {
  auto steps = nlohmann::json::array();
  for (const auto& step : transcript.steps) {
    steps.push_back({{"t", step.t},
                     {"released", step.released},
                     {"OFF", step.off},
                     {"m", step.machines},
                     {"scheduled", step.scheduled}});
  }
  return {{"algorithm", "alpha-edf"},
          {"alpha", transcript.alpha.to_string()},
          {"cost", transcript.cost},
          {"OFF", transcript.off_final},
          {"misses", transcript.misses},
          {"steps", std::move(steps)}};
}

Transcript transcript_from_json(const nlohmann::json& doc) {
  Transcript transcript;
  transcript.alpha = Factor::parse(doc.at("alpha").get<std::string>());
  transcript.misses = doc.at("misses").get<std::vector<JobId>>();
  for (const auto& entry : doc.at("steps")) {
    StepRecord record;
    record.t = entry.at("t").get<Step>();
    record.released = entry.at("released").get<std::vector<JobId>>();
    record.off = entry.at("OFF").get<std::int64_t>();
    record.machines = entry.at("m").get<std::int64_t>();
    record.scheduled = entry.at("scheduled").get<std::vector<JobId>>();
    for (std::size_t i = 0; i < record.scheduled.size(); ++i) {
      transcript.schedule.assignments.push_back({record.scheduled[i], static_cast<MachineId>(i),
                                                 Rational(record.t), Rational(record.t + 1)});
    }
    transcript.busy_peak =
        std::max(transcript.busy_peak, static_cast<std::int64_t>(record.scheduled.size()));
    transcript.profile.set(record.t, record.machines);
    transcript.off_series.push_back(record.off);
    transcript.cost = std::max(transcript.cost, record.machines);
    transcript.off_final = record.off;
    transcript.steps.push_back(std::move(record));
  }
  transcript.schedule.misses = transcript.misses;
  return transcript;
}

}  // namespace sched::online
