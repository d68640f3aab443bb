#include "sched/throughput.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "sched/instance_io.hpp"
#include "sched/oracle.hpp"

namespace sched::throughput {

MatchingInstance::MatchingInstance(std::int64_t k, std::vector<OfflineVertex> offline,
                                   std::vector<Step> steps,
                                   std::vector<std::vector<std::size_t>> neighborhoods)
    : k_(k),
      offline_(std::move(offline)),
      steps_(std::move(steps)),
      neighborhoods_(std::move(neighborhoods)) {
  if (steps_.size() != neighborhoods_.size()) {
    throw ContractViolation("one neighborhood per online step expected");
  }
  online_.reserve(steps_.size() * static_cast<std::size_t>(k_));
  for (std::size_t g = 0; g < steps_.size(); ++g) {
    for (MachineId i = 0; i < k_; ++i) online_.push_back({steps_[g], i, g});
  }
}

std::span<const std::size_t> MatchingInstance::neighbors(std::size_t v) const {
  return neighborhoods_.at(online_.at(v).group);
}

bool MatchingInstance::adjacent(std::size_t u, std::size_t v) const {
  const auto n = neighbors(v);
  return std::binary_search(n.begin(), n.end(), u);
}

std::size_t MatchingInstance::online_index(Step t, MachineId machine) const {
  if (machine < 0 || machine >= k_) return npos;
  const auto it = std::lower_bound(steps_.begin(), steps_.end(), t);
  if (it == steps_.end() || *it != t) return npos;
  return static_cast<std::size_t>(it - steps_.begin()) * static_cast<std::size_t>(k_) +
         static_cast<std::size_t>(machine);
}

std::size_t MatchingInstance::offline_index(JobId job) const {
  const auto it = std::lower_bound(offline_.begin(), offline_.end(), job,
                                   [](const OfflineVertex& u, JobId id) { return u.job < id; });
  if (it == offline_.end() || it->job != job) return npos;
  return static_cast<std::size_t>(it - offline_.begin());
}

MatchingInstance reduce_to_matching(const Instance& instance) {
  if (instance.model != Model::Throughput || !instance.machines || *instance.machines < 1) {
    throw ContractViolation("reduce_to_matching needs a throughput instance with k >= 1");
  }
  auto jobs = to_unit_jobs(instance.jobs);
  std::sort(jobs.begin(), jobs.end(), [](const UnitJob& a, const UnitJob& b) { return a.id < b.id; });

  std::vector<OfflineVertex> offline;
  offline.reserve(jobs.size());
  std::map<Step, std::vector<std::size_t>> live;
  for (std::size_t u = 0; u < jobs.size(); ++u) {
    const auto& job = jobs[u];
    offline.push_back({job.id, job.weight, job.release});
    for (Step t = job.release; t < job.deadline; ++t) live[t].push_back(u);
  }
  std::vector<Step> steps;
  std::vector<std::vector<std::size_t>> neighborhoods;
  for (auto& [t, us] : live) {
    steps.push_back(t);
    neighborhoods.push_back(std::move(us));
  }
  return MatchingInstance(*instance.machines, std::move(offline), std::move(steps),
                          std::move(neighborhoods));
}

void check_matching(const MatchingInstance& minstance, const Matching& matching) {
  std::vector<bool> used_u(minstance.offline().size(), false);
  std::vector<bool> used_v(minstance.online().size(), false);
  Rational weight{0};
  for (const auto& [u, v] : matching.pairs) {
    if (u >= used_u.size() || v >= used_v.size() || !minstance.adjacent(u, v)) {
      throw ContractViolation("pair (" + std::to_string(u) + ", " + std::to_string(v) +
                              ") is not an edge");
    }
    if (used_u[u] || used_v[v]) {
      throw ContractViolation("vertex matched twice in pair (" + std::to_string(u) + ", " +
                              std::to_string(v) + ")");
    }
    used_u[u] = used_v[v] = true;
    weight += minstance.offline()[u].weight;
  }
  if (weight != matching.weight) throw ContractViolation("matching weight does not match its pairs");
}

Schedule matching_to_schedule(const MatchingInstance& minstance, const Matching& matching) {
  check_matching(minstance, matching);
  auto pairs = matching.pairs;
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
  Schedule schedule;
  for (const auto& [u, v] : pairs) {
    const auto& slot = minstance.online()[v];
    schedule.assignments.push_back(
        {minstance.offline()[u].job, slot.machine, Rational(slot.t), Rational(slot.t + 1)});
  }
  return schedule;
}

Matching schedule_to_matching(const MatchingInstance& minstance, const Schedule& schedule) {
  Matching matching;
  for (const auto& a : schedule.assignments) {
    if (!is_integral(a.start) || a.end != a.start + 1) {
      throw ContractViolation("job " + std::to_string(a.job) + " is not in a unit slot");
    }
    const auto u = minstance.offline_index(a.job);
    const auto v = minstance.online_index(a.start.numerator(), a.machine);
    if (u == MatchingInstance::npos || v == MatchingInstance::npos) {
      throw ContractViolation("job " + std::to_string(a.job) + " has no matching edge");
    }
    matching.pairs.emplace_back(u, v);
    matching.weight += minstance.offline()[u].weight;
  }
  std::sort(matching.pairs.begin(), matching.pairs.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
  check_matching(minstance, matching);
  return matching;
}

namespace {

template <class Better>
Matching greedy_by(const MatchingInstance& minstance, Better better) {
  Matching matching;
  std::vector<bool> matched(minstance.offline().size(), false);
  for (std::size_t v = 0; v < minstance.online().size(); ++v) {
    auto best = MatchingInstance::npos;
    for (const auto u : minstance.neighbors(v)) {
      if (matched[u]) continue;
      if (best == MatchingInstance::npos || better(u, best)) best = u;
    }
    if (best == MatchingInstance::npos) continue;
    matched[best] = true;
    matching.pairs.emplace_back(best, v);
    matching.weight += minstance.offline()[best].weight;
  }
  return matching;
}

}  // namespace

Matching perturbed_greedy(const MatchingInstance& minstance, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto offline = minstance.offline();
  std::vector<std::size_t> order(offline.size());
  for (std::size_t u = 0; u < order.size(); ++u) order[u] = u;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return offline[a].reveal < offline[b].reveal;
  });

  // Draws happen in reveal order, so score[u] depends only on the seed and
  // the instance, not on which vertices end up matched.
  std::vector<double> score(offline.size(), 0.0);
  for (const auto u : order) {
    const double x = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    score[u] = to_double(offline[u].weight) * (1.0 - std::exp(x - 1.0));
  }
  return greedy_by(minstance, [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
}

Matching greedy_baseline(const MatchingInstance& minstance) {
  const auto offline = minstance.offline();
  return greedy_by(minstance,
                   [&](std::size_t a, std::size_t b) { return offline[a].weight > offline[b].weight; });
}

Schedule edf_throughput_unweighted(const Instance& instance) {
  if (instance.model != Model::Throughput || !instance.machines) {
    throw ContractViolation("edf_throughput_unweighted needs a throughput instance");
  }
  const auto jobs = to_unit_jobs(instance.jobs);
  for (const auto& job : jobs) {
    if (job.weight != jobs.front().weight) {
      throw ContractViolation("weighted instance: use perturbed_greedy instead of EDF");
    }
  }
  const auto k = *instance.machines;
  Schedule schedule;
  if (jobs.empty()) return schedule;
  Step horizon = 0;
  for (const auto& job : jobs) horizon = std::max(horizon, job.deadline);
  const auto result = oracle::edf_simulate(jobs, MachineProfile::constant(k, horizon));
  schedule.assignments = result.schedule.assignments;
  std::sort(schedule.assignments.begin(), schedule.assignments.end(),
            [](const Assignment& a, const Assignment& b) {
              return a.start != b.start ? a.start < b.start : a.machine < b.machine;
            });
  return schedule;
}

Rational schedule_weight(const Instance& instance, const Schedule& schedule) {
  std::map<JobId, Rational> weight;
  for (const auto& job : instance.jobs) weight[job.id] = job.weight;
  Rational total{0};
  for (const auto& a : schedule.assignments) total += weight.at(a.job);
  return total;
}

std::string_view to_string(Algorithm algorithm) {
  return algorithm == Algorithm::PerturbedGreedy ? "perturbed-greedy" : "greedy";
}

std::optional<Algorithm> parse_algorithm(std::string_view text) {
  if (text == "perturbed-greedy") return Algorithm::PerturbedGreedy;
  if (text == "greedy") return Algorithm::Greedy;
  return std::nullopt;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t trial) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (trial + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

double trial_weight(const MatchingInstance& minstance, Algorithm algorithm, std::uint64_t seed) {
  const auto m = algorithm == Algorithm::PerturbedGreedy ? perturbed_greedy(minstance, seed)
                                                         : greedy_baseline(minstance);
  return to_double(m.weight);
}

RatioEstimate summarize(const std::vector<double>& weights, const Rational& opt,
                        std::uint64_t seed) {
  RatioEstimate estimate;
  estimate.trials = static_cast<std::int64_t>(weights.size());
  estimate.seed = seed;
  estimate.opt = opt;
  double sum = 0.0;
  for (const auto w : weights) sum += w;
  estimate.mean = sum / static_cast<double>(weights.size());
  if (weights.size() > 1) {
    double squares = 0.0;
    for (const auto w : weights) squares += (w - estimate.mean) * (w - estimate.mean);
    const auto n = static_cast<double>(weights.size());
    estimate.stderr_ = std::sqrt(squares / (n - 1.0) / n);
  }
  const double opt_value = to_double(opt);
  if (opt_value > 0.0) {
    estimate.ratio = estimate.mean / opt_value;
    estimate.stderr_ /= opt_value;
  } else {
    estimate.ratio = 1.0;
    estimate.stderr_ = 0.0;
  }
  return estimate;
}

}  // namespace

RatioEstimate estimate_ratio(const Instance& instance, Algorithm algorithm, std::int64_t trials,
                             std::uint64_t seed) {
  if (trials < 1) throw ContractViolation("trials must be >= 1");
  const auto minstance = reduce_to_matching(instance);
  const auto opt = oracle::offline_throughput_opt(instance).weight;
  std::vector<double> weights(static_cast<std::size_t>(trials));
  for (std::int64_t i = 0; i < trials; ++i) {
    weights[static_cast<std::size_t>(i)] =
        trial_weight(minstance, algorithm, derive_seed(seed, static_cast<std::uint64_t>(i)));
  }
  return summarize(weights, opt, seed);
}

RatioEstimate estimate_ratio_parallel(const Instance& instance, Algorithm algorithm,
                                      std::int64_t trials, std::uint64_t seed) {
  if (trials < 1) throw ContractViolation("trials must be >= 1");
  const auto minstance = reduce_to_matching(instance);
  const auto opt = oracle::offline_throughput_opt(instance).weight;
  std::vector<double> weights(static_cast<std::size_t>(trials));
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < trials; ++i) {
    weights[static_cast<std::size_t>(i)] =
        trial_weight(minstance, algorithm, derive_seed(seed, static_cast<std::uint64_t>(i)));
  }
  return summarize(weights, opt, seed);
}

nlohmann::json matching_instance_to_json(const MatchingInstance& minstance) {
  auto offline = nlohmann::json::array();
  for (std::size_t u = 0; u < minstance.offline().size(); ++u) {
    const auto& vertex = minstance.offline()[u];
    offline.push_back({{"u", u},
                       {"job", vertex.job},
                       {"w", rational_to_json(vertex.weight)},
                       {"reveal", vertex.reveal}});
  }
  auto online = nlohmann::json::array();
  for (std::size_t v = 0; v < minstance.online().size(); ++v) {
    const auto& vertex = minstance.online()[v];
    const auto n = minstance.neighbors(v);
    online.push_back({{"v", v},
                      {"t", vertex.t},
                      {"machine", vertex.machine},
                      {"neighbors", std::vector<std::size_t>(n.begin(), n.end())}});
  }
  return {{"k", minstance.machines()}, {"offline", std::move(offline)}, {"online", std::move(online)}};
}

nlohmann::json matching_to_json(const Matching& matching) {
  auto pairs = nlohmann::json::array();
  for (const auto& [u, v] : matching.pairs) pairs.push_back({u, v});
  return {{"weight", rational_to_json(matching.weight)}, {"pairs", std::move(pairs)}};
}

}  // namespace sched::throughput
