#pragma once

// Deliberately naive reference computations, written independently of the
// library so that tests never compare the library against itself.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <cmath>
#include <map>
#include <vector>

#include "sched/core.hpp"

namespace ref {

using sched::Rational;
using sched::Step;
using sched::UnitJob;

/// EDF with m[t] machines at step t; returns the number of missed jobs.
inline std::int64_t edf_misses(const std::vector<UnitJob>& jobs, const std::vector<std::int64_t>& m) {
  Step horizon = 0;
  for (const auto& j : jobs) horizon = std::max(horizon, j.deadline);
  std::vector<UnitJob> pending;
  std::int64_t misses = 0;
  for (Step t = 0; t < horizon; ++t) {
    for (const auto& j : jobs) {
      if (j.release == t) pending.push_back(j);
    }
    std::sort(pending.begin(), pending.end(), [](const UnitJob& a, const UnitJob& b) {
      return a.deadline != b.deadline ? a.deadline < b.deadline : a.id < b.id;
    });
    const auto cap = t < static_cast<Step>(m.size()) ? m[static_cast<std::size_t>(t)] : 0;
    const auto run = std::min<std::int64_t>(cap, static_cast<std::int64_t>(pending.size()));
    pending.erase(pending.begin(), pending.begin() + run);
    const auto before = pending.size();
    std::erase_if(pending, [&](const UnitJob& j) { return j.deadline <= t + 1; });
    misses += static_cast<std::int64_t>(before - pending.size());
  }
  return misses + static_cast<std::int64_t>(pending.size());
}

/// Tries every slot for every job against per-step capacities.
inline bool exhaustive_feasible(const std::vector<UnitJob>& jobs, std::vector<std::int64_t> cap) {
  std::function<bool(std::size_t)> place = [&](std::size_t i) {
    if (i == jobs.size()) return true;
    for (Step t = jobs[i].release; t < jobs[i].deadline; ++t) {
      if (t >= static_cast<Step>(cap.size()) || cap[static_cast<std::size_t>(t)] == 0) continue;
      --cap[static_cast<std::size_t>(t)];
      if (place(i + 1)) return true;
      ++cap[static_cast<std::size_t>(t)];
    }
    return false;
  };
  return place(0);
}

inline std::int64_t off(const std::vector<UnitJob>& jobs) {
  if (jobs.empty()) return 0;
  Step horizon = 0;
  for (const auto& j : jobs) horizon = std::max(horizon, j.deadline);
  for (std::int64_t m = 1;; ++m) {
    if (edf_misses(jobs, std::vector<std::int64_t>(static_cast<std::size_t>(horizon), m)) == 0) {
      return m;
    }
  }
}

/// Maximum-weight feasible subset on k machines by subset enumeration.
inline Rational throughput_opt(const std::vector<UnitJob>& jobs, std::int64_t k) {
  Step horizon = 0;
  for (const auto& j : jobs) horizon = std::max(horizon, j.deadline);
  Rational best{0};
  const std::size_t n = jobs.size();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::vector<UnitJob> subset;
    Rational weight{0};
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        subset.push_back(jobs[i]);
        weight += jobs[i].weight;
      }
    }
    if (weight <= best) continue;
    if (exhaustive_feasible(subset, std::vector<std::int64_t>(static_cast<std::size_t>(horizon), k))) {
      best = weight;
    }
  }
  return best;
}

/// Counter simulation of FIFO service with online[t] machines at step t.
inline std::vector<std::int64_t> backlog(const std::vector<std::int64_t>& released,
                                         const std::vector<std::int64_t>& online) {
  std::vector<std::int64_t> out;
  std::int64_t pending = 0;
  for (std::size_t t = 0; t < released.size(); ++t) {
    pending += released[t];
    pending -= std::min(pending, online[t]);
    out.push_back(pending);
  }
  return out;
}

/// OFF by bisection on the naive EDF simulation.
inline std::int64_t off_bisect(const std::vector<UnitJob>& jobs) {
  if (jobs.empty()) return 0;
  Step horizon = 0;
  for (const auto& j : jobs) horizon = std::max(horizon, j.deadline);
  std::int64_t lo = 1;
  auto hi = static_cast<std::int64_t>(jobs.size());
  while (lo < hi) {
    const auto mid = lo + (hi - lo) / 2;
    if (edf_misses(jobs, std::vector<std::int64_t>(static_cast<std::size_t>(horizon), mid)) == 0) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

/// Per-step OFF when every job shares deadline n and a[t] jobs arrive at t:
/// max over s <= t of ceil(sum_{u=s..t} a_u / (n - s)).
inline std::vector<std::int64_t> common_deadline_off(const std::vector<std::int64_t>& a, std::int64_t n) {
  std::vector<std::int64_t> out;
  for (std::size_t t = 0; t < a.size(); ++t) {
    std::int64_t best = 0;
    std::int64_t suffix = 0;
    for (std::size_t s = t + 1; s-- > 0;) {
      suffix += a[s];
      const auto room = n - static_cast<std::int64_t>(s);
      best = std::max(best, (suffix + room - 1) / room);
    }
    out.push_back(best);
  }
  return out;
}

inline std::int64_t ceil_e_times(std::int64_t x) {
  return static_cast<std::int64_t>(std::ceil(std::exp(1.0L) * static_cast<long double>(x)));
}

inline std::int64_t ceil_of(const Rational& x) {
  const auto q = x.numerator() / x.denominator();
  return q * x.denominator() == x.numerator() ? q : q + 1;
}

/// Volume bound for a common deadline: every candidate start, volume released at or after it.
inline std::int64_t volume_lb(const std::vector<sched::Job>& jobs, std::int64_t d) {
  std::int64_t best = jobs.empty() ? 0 : 1;
  std::vector<Rational> starts{Rational(0)};
  for (const auto& j : jobs) starts.push_back(j.release);
  for (const auto& s : starts) {
    Rational volume(0);
    for (const auto& j : jobs) {
      if (j.release >= s) volume += j.length;
    }
    if (volume > 0) best = std::max(best, ceil_of(volume / (Rational(d) - s)));
  }
  return best;
}

/// Each assignment inside its job's window with the exact length, each job at
/// most once, no overlap per machine; with `complete`, every job placed.
inline bool valid_schedule(const std::vector<sched::Job>& jobs, const sched::Schedule& schedule,
                           bool complete) {
  std::map<sched::JobId, const sched::Job*> byid;
  for (const auto& j : jobs) byid[j.id] = &j;
  if (complete && (schedule.assignments.size() != jobs.size() || !schedule.misses.empty())) return false;
  std::map<sched::MachineId, std::vector<std::pair<Rational, Rational>>> busy;
  std::map<sched::JobId, int> seen;
  for (const auto& a : schedule.assignments) {
    const auto it = byid.find(a.job);
    if (it == byid.end() || ++seen[a.job] > 1) return false;
    const auto& j = *it->second;
    if (a.start < j.release || a.end > j.deadline || a.end - a.start != j.length) return false;
    busy[a.machine].push_back({a.start, a.end});
  }
  for (auto& [m, spans] : busy) {
    std::sort(spans.begin(), spans.end());
    for (std::size_t i = 1; i < spans.size(); ++i) {
      if (spans[i].first < spans[i - 1].second) return false;
    }
  }
  return true;
}

}  // namespace ref
