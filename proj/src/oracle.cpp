#include "sched/oracle.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>

#include "sched/flow.hpp"

namespace sched::oracle {

std::int64_t EdfTrace::scheduled_before(Step t) const {
  std::int64_t count = 0;
  for (Step s = 0; s < std::min(t, horizon()); ++s) {
    count += static_cast<std::int64_t>(chosen[static_cast<std::size_t>(s)].size());
  }
  return count;
}

EdfResult edf_simulate(std::span<const UnitJob> jobs, const MachineProfile& profile) {
  std::vector<const UnitJob*> order;
  order.reserve(jobs.size());
  Step horizon = 0;
  for (const auto& job : jobs) {
    order.push_back(&job);
    horizon = std::max(horizon, job.deadline);
  }
  std::sort(order.begin(), order.end(), [](const UnitJob* a, const UnitJob* b) {
    return a->release != b->release ? a->release < b->release : a->id < b->id;
  });

  using Key = std::pair<Step, JobId>;  // (deadline, id)
  std::priority_queue<Key, std::vector<Key>, std::greater<>> pending;
  EdfResult result;
  auto& trace = result.trace;
  trace.chosen.resize(static_cast<std::size_t>(horizon));

  auto record_miss = [&](const Key& key) {
    trace.misses.push_back(key.second);
    result.schedule.misses.push_back(key.second);
    if (!trace.first_miss) trace.first_miss = FirstMiss{key.second, key.first};
  };

  std::size_t next = 0;
  for (Step t = 0; t < horizon; ++t) {
    while (next < order.size() && order[next]->release <= t) {
      pending.emplace(order[next]->deadline, order[next]->id);
      ++next;
    }
    while (!pending.empty() && pending.top().first <= t) {
      record_miss(pending.top());
      pending.pop();
    }
    auto& chosen = trace.chosen[static_cast<std::size_t>(t)];
    const auto capacity = profile.at(t);
    while (!pending.empty() && static_cast<std::int64_t>(chosen.size()) < capacity) {
      const auto [deadline, id] = pending.top();
      pending.pop();
      const auto machine = static_cast<MachineId>(chosen.size());
      chosen.push_back(id);
      trace.slot_of.emplace(id, t);
      result.schedule.assignments.push_back({id, machine, Rational(t), Rational(t + 1)});
    }
  }
  while (!pending.empty()) {
    record_miss(pending.top());
    pending.pop();
  }
  return result;
}

std::vector<Demand> group_by_window(std::span<const UnitJob> jobs) {
  std::map<std::pair<Step, Step>, std::int64_t> windows;
  for (const auto& job : jobs) ++windows[{job.release, job.deadline}];
  std::vector<Demand> demands;
  demands.reserve(windows.size());
  for (const auto& [window, count] : windows) {
    demands.push_back({window.first, window.second, count});
  }
  return demands;
}

bool edf_feasible(std::span<const Demand> demands, std::int64_t machines) {
  // Filling consecutive m-capacity slots in deadline order between two
  // release events is exactly what step-wise EDF does on that stretch.
  std::int64_t total = 0;
  for (const auto& demand : demands) total += demand.count;
  if (total == 0) return true;
  if (machines <= 0) return false;

  using Entry = std::pair<Step, std::int64_t>;  // (deadline, remaining)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  std::size_t next = 0;
  Step t = demands.front().release;
  std::int64_t used = 0;  // units already placed in slot t

  while (next < demands.size() || !heap.empty()) {
    if (heap.empty()) {
      if (used > 0) {
        ++t;
        used = 0;
      }
      t = std::max(t, demands[next].release);
    }
    while (next < demands.size() && demands[next].release <= t) {
      if (demands[next].count > 0) heap.emplace(demands[next].deadline, demands[next].count);
      ++next;
    }
    const Step next_release =
        next < demands.size() ? demands[next].release : std::numeric_limits<Step>::max();

    while (!heap.empty()) {
      auto [deadline, remaining] = heap.top();
      if (deadline <= t) return false;
      const Step limit = std::min(deadline, next_release);
      const __int128 capacity = static_cast<__int128>(limit - t) * machines - used;
      const auto take = static_cast<std::int64_t>(
          std::min<__int128>(capacity, static_cast<__int128>(remaining)));
      const __int128 filled = static_cast<__int128>(used) + take;
      t += static_cast<Step>(filled / machines);
      used = static_cast<std::int64_t>(filled % machines);
      remaining -= take;
      heap.pop();
      if (remaining > 0) {
        if (limit == deadline) return false;
        heap.emplace(deadline, remaining);
      }
      if (t >= next_release) break;
    }
  }
  return true;
}

bool flow_feasible(std::span<const UnitJob> jobs, const MachineProfile& profile, Step d) {
  std::vector<UnitJob> relevant;
  for (const auto& job : jobs) {
    if (job.deadline <= d) relevant.push_back(job);
  }
  if (relevant.empty()) return true;

  const auto demands = group_by_window(relevant);
  std::set<Step> cuts;
  for (const auto& demand : demands) {
    cuts.insert(demand.release);
    cuts.insert(demand.deadline);
  }
  const std::vector<Step> bounds(cuts.begin(), cuts.end());
  const int groups = static_cast<int>(demands.size());
  const int intervals = static_cast<int>(bounds.size()) - 1;
  const int source = 0;
  const int sink = 1;
  auto group_node = [&](int g) { return 2 + g; };
  auto interval_node = [&](int i) { return 2 + groups + i; };

  flow::MaxFlow network(2 + groups + intervals);
  std::int64_t needed = 0;
  for (int g = 0; g < groups; ++g) {
    network.add_edge(source, group_node(g), demands[static_cast<std::size_t>(g)].count);
    needed += demands[static_cast<std::size_t>(g)].count;
  }
  for (int i = 0; i < intervals; ++i) {
    const auto from = bounds[static_cast<std::size_t>(i)];
    const auto to = bounds[static_cast<std::size_t>(i) + 1];
    std::int64_t capacity = 0;
    for (Step t = from; t < to; ++t) capacity += profile.at(t);
    if (capacity > 0) network.add_edge(interval_node(i), sink, capacity);
    for (int g = 0; g < groups; ++g) {
      const auto& demand = demands[static_cast<std::size_t>(g)];
      if (demand.release <= from && to <= demand.deadline) {
        network.add_edge(group_node(g), interval_node(i), demand.count);
      }
    }
  }
  return network.run(source, sink) == needed;
}

namespace {

bool place(std::span<const UnitJob> jobs, std::size_t index, std::vector<std::int64_t>& room,
           Step origin) {
  if (index == jobs.size()) return true;
  const auto& job = jobs[index];
  for (Step t = job.release; t < job.deadline; ++t) {
    auto& slot = room[static_cast<std::size_t>(t - origin)];
    if (slot == 0) continue;
    --slot;
    const bool ok = place(jobs, index + 1, room, origin);
    ++slot;
    if (ok) return true;
  }
  return false;
}

}  // namespace

bool brute_force_feasible(std::span<const UnitJob> jobs, const MachineProfile& profile) {
  constexpr std::size_t kMaxJobs = 8;
  constexpr Step kMaxSlots = 6;
  if (jobs.empty()) return true;
  if (jobs.size() > kMaxJobs) {
    throw std::length_error("brute_force_feasible: more than 8 jobs");
  }
  Step origin = jobs.front().release;
  Step end = jobs.front().deadline;
  for (const auto& job : jobs) {
    origin = std::min(origin, job.release);
    end = std::max(end, job.deadline);
  }
  if (end - origin > kMaxSlots) {
    throw std::length_error("brute_force_feasible: time span above 6 slots");
  }
  std::vector<std::int64_t> room;
  for (Step t = origin; t < end; ++t) room.push_back(profile.at(t));
  return place(jobs, 0, room, origin);
}

std::int64_t off_unit(std::span<const UnitJob> jobs) {
  if (jobs.empty()) return 0;
  const auto demands = group_by_window(jobs);
  std::int64_t lo = 1;
  auto hi = static_cast<std::int64_t>(jobs.size());
  while (lo < hi) {
    const auto mid = lo + (hi - lo) / 2;
    if (edf_feasible(demands, mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

void OffTracker::add(Step release, Step deadline, std::int64_t count) {
  if (count <= 0) return;
  windows_[{release, deadline}] += count;
  total_ += count;
  dirty_ = true;
}

std::int64_t OffTracker::off() {
  if (!dirty_) return last_;
  dirty_ = false;
  scratch_.clear();
  for (const auto& [window, count] : windows_) {
    scratch_.push_back({window.first, window.second, count});
  }
  if (last_ > 0 && edf_feasible(scratch_, last_)) return last_;

  // Gallop upward from the previous optimum, then bisect.
  std::int64_t infeasible = std::max<std::int64_t>(last_, 0);
  std::int64_t step = 1;
  std::int64_t feasible = std::min(infeasible + step, total_);
  while (!edf_feasible(scratch_, feasible)) {
    infeasible = feasible;
    step *= 2;
    feasible = std::min(infeasible + step, total_);
  }
  while (feasible - infeasible > 1) {
    const auto mid = infeasible + (feasible - infeasible) / 2;
    if (edf_feasible(scratch_, mid)) {
      feasible = mid;
    } else {
      infeasible = mid;
    }
  }
  last_ = feasible;
  return last_;
}

std::vector<std::int64_t> off_prefix_series(std::span<const UnitJob> jobs) {
  if (jobs.empty()) return {};
  std::vector<const UnitJob*> order;
  Step last_release = 0;
  for (const auto& job : jobs) {
    order.push_back(&job);
    last_release = std::max(last_release, job.release);
  }
  std::sort(order.begin(), order.end(),
            [](const UnitJob* a, const UnitJob* b) { return a->release < b->release; });

  OffTracker tracker;
  std::vector<std::int64_t> series;
  series.reserve(static_cast<std::size_t>(last_release) + 1);
  std::size_t next = 0;
  for (Step t = 0; t <= last_release; ++t) {
    while (next < order.size() && order[next]->release <= t) tracker.add(*order[next++]);
    series.push_back(tracker.off());
  }
  return series;
}

std::int64_t volume_lower_bound(std::span<const Job> jobs, const Rational& deadline) {
  if (jobs.empty()) return 0;
  std::vector<const Job*> order;
  for (const auto& job : jobs) order.push_back(&job);
  std::sort(order.begin(), order.end(),
            [](const Job* a, const Job* b) { return a->release > b->release; });

  // Sweep releases from latest to earliest, accumulating suffix volume.
  std::int64_t best = 1;
  Rational suffix(0);
  for (std::size_t i = 0; i < order.size(); ++i) {
    suffix += order[i]->length;
    const auto& r = order[i]->release;
    const bool last_of_release = i + 1 == order.size() || order[i + 1]->release != r;
    if (last_of_release) best = std::max(best, ceil_int(suffix / (deadline - r)));
  }
  best = std::max(best, ceil_int(suffix / deadline));
  return best;
}

ThroughputOptimum offline_throughput_opt(const Instance& instance) {
  const auto jobs = to_unit_jobs(instance.jobs);
  const std::int64_t k = instance.machines.value_or(1);
  ThroughputOptimum result;
  if (jobs.empty()) return result;

  std::int64_t scale = 1;
  for (const auto& job : jobs) scale = std::lcm(scale, job.weight.denominator());

  std::set<Step> cuts;
  for (const auto& job : jobs) {
    cuts.insert(job.release);
    cuts.insert(job.deadline);
  }
  const std::vector<Step> bounds(cuts.begin(), cuts.end());
  const int n = static_cast<int>(jobs.size());
  const int intervals = static_cast<int>(bounds.size()) - 1;
  const int source = 0;
  const int sink = 1;
  auto job_node = [&](int j) { return 2 + j; };
  auto interval_node = [&](int i) { return 2 + n + i; };

  flow::MinCostFlow network(2 + n + intervals);
  std::vector<std::vector<std::pair<int, int>>> edges_of(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const auto& job = jobs[static_cast<std::size_t>(j)];
    const auto cost = (job.weight * scale).numerator();
    network.add_edge(source, job_node(j), 1, -cost);
    for (int i = 0; i < intervals; ++i) {
      if (job.release <= bounds[static_cast<std::size_t>(i)] &&
          bounds[static_cast<std::size_t>(i) + 1] <= job.deadline) {
        edges_of[static_cast<std::size_t>(j)].emplace_back(
            i, network.add_edge(job_node(j), interval_node(i), 1, 0));
      }
    }
  }
  for (int i = 0; i < intervals; ++i) {
    const auto length = bounds[static_cast<std::size_t>(i) + 1] - bounds[static_cast<std::size_t>(i)];
    network.add_edge(interval_node(i), sink, k * length, 0);
  }
  const auto flow_result = network.run(source, sink, /*only_negative=*/true);
  result.weight = Rational(-flow_result.cost, scale);

  // Any job routed to an interval may take any of its k * length cells.
  std::vector<std::int64_t> filled(static_cast<std::size_t>(std::max(intervals, 0)), 0);
  for (int j = 0; j < n; ++j) {
    for (const auto& [i, edge] : edges_of[static_cast<std::size_t>(j)]) {
      if (network.flow_on(edge) == 0) continue;
      auto& cell = filled[static_cast<std::size_t>(i)];
      const Step slot = bounds[static_cast<std::size_t>(i)] + cell / k;
      result.schedule.assignments.push_back(
          {jobs[static_cast<std::size_t>(j)].id, cell % k, Rational(slot), Rational(slot + 1)});
      ++cell;
    }
  }
  std::sort(result.schedule.assignments.begin(), result.schedule.assignments.end(),
            [](const Assignment& a, const Assignment& b) {
              return a.start != b.start ? a.start < b.start : a.machine < b.machine;
            });
  return result;
}

}  // namespace sched::oracle
