#include "sched/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <omp.h>

#include "sched/oracle.hpp"

namespace sched::adversary {

namespace {

using Wide = boost::multiprecision::cpp_bin_float_50;

void check_params(std::int64_t n, std::int64_t big_n) {
  if (n < 1) throw ContractViolation("adversary needs n >= 1");
  if (big_n < 1) throw ContractViolation("adversary needs N >= 1");
}

std::vector<__int128> prefix_sums(std::span<const std::int64_t> releases) {
  std::vector<__int128> prefix(releases.size() + 1, 0);
  for (std::size_t t = 0; t < releases.size(); ++t) prefix[t + 1] = prefix[t] + releases[t];
  return prefix;
}

/// Every suffix window [s, t] fits on m machines before deadline n. The slack
/// prefix[s] + m (n - s) is convex in s (releases are nondecreasing) and
/// minimal at the first s with a_s >= m, clipped to t.
bool fits(std::span<const std::int64_t> releases, const std::vector<__int128>& prefix,
          std::int64_t n, Step t, std::int64_t m) {
  const auto first_heavy = std::lower_bound(releases.begin(), releases.end(), m) - releases.begin();
  const auto s = std::min<Step>(first_heavy, t);
  return prefix[static_cast<std::size_t>(t) + 1] - prefix[static_cast<std::size_t>(s)] <=
         static_cast<__int128>(m) * (n - s);
}

std::int64_t bisect_off(std::span<const std::int64_t> releases,
                        const std::vector<__int128>& prefix, std::int64_t n, Step t,
                        std::int64_t known_feasible_floor) {
  const auto total = prefix[static_cast<std::size_t>(t) + 1];
  if (total == 0) return 0;
  std::int64_t lo = std::max<std::int64_t>(known_feasible_floor, 1);
  if (fits(releases, prefix, n, t, lo)) return lo;
  // Gallop to a feasible upper end, then bisect on (infeasible, feasible].
  std::int64_t infeasible = lo;
  std::int64_t step = 1;
  std::int64_t feasible = infeasible + step;
  while (!fits(releases, prefix, n, t, feasible)) {
    infeasible = feasible;
    step *= 2;
    feasible = infeasible + step;
  }
  while (feasible - infeasible > 1) {
    const auto mid = infeasible + (feasible - infeasible) / 2;
    if (fits(releases, prefix, n, t, mid)) {
      feasible = mid;
    } else {
      infeasible = mid;
    }
  }
  return feasible;
}

void require_nondecreasing(std::span<const std::int64_t> releases) {
  if (!std::is_sorted(releases.begin(), releases.end())) {
    throw ContractViolation("aggregate OFF kernels need nondecreasing releases");
  }
}

}  // namespace

std::int64_t release_count(std::int64_t n, std::int64_t big_n, Step t) {
  if (t < 0 || t >= n) throw ContractViolation("adversary step out of range [0, n-1]");
  return big_n / (n - t);
}

Adversary::Adversary(std::int64_t n, std::int64_t big_n, Factor rho)
    : n_(n), big_n_(big_n), rho_(rho) {
  check_params(n, big_n);
}

std::vector<UnitJob> Adversary::release(Step t) {
  const auto count = release_count(n_, big_n_, t);
  if (stopped_at_) return {};
  std::vector<UnitJob> jobs;
  jobs.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) jobs.push_back({next_id_++, t, n_, Rational(1)});
  return jobs;
}

void Adversary::observe(Step t, std::int64_t online, std::int64_t off) {
  if (!stopped_at_ && rho_.reached_by(online, off)) stopped_at_ = t;
}

std::vector<UnitJob> adversary_jobs(std::int64_t n, std::int64_t big_n) {
  check_params(n, big_n);
  std::vector<UnitJob> jobs;
  JobId id = 0;
  for (Step t = 0; t < n; ++t) {
    const auto count = release_count(n, big_n, t);
    for (std::int64_t i = 0; i < count; ++i) jobs.push_back({id++, t, n, Rational(1)});
  }
  return jobs;
}

Instance adversary_instance(std::int64_t n, std::int64_t big_n) {
  Instance instance;
  instance.model = Model::UnitMin;
  instance.horizon = n;
  instance.jobs = to_jobs(adversary_jobs(n, big_n));
  return instance;
}

GameTranscript play_game(online::OnlineMinimizer& algorithm, std::int64_t n, std::int64_t big_n,
                         Factor rho) {
  Adversary adversary(n, big_n, rho);
  oracle::OffTracker audit;
  GameTranscript game;
  game.n = n;
  game.big_n = big_n;
  game.rho = rho;
  game.algorithm = algorithm.name();

  std::int64_t backlog = 0;
  for (Step t = 0; t < n; ++t) {
    const auto jobs = adversary.release(t);
    for (const auto& job : jobs) audit.add(job);
    const auto outcome = algorithm.step(t, jobs);
    const auto off = audit.off();
    adversary.observe(t, outcome.machines, off);

    const auto released = static_cast<std::int64_t>(jobs.size());
    backlog += released - static_cast<std::int64_t>(outcome.scheduled.size()) -
               static_cast<std::int64_t>(outcome.missed.size());
    game.missed_jobs += static_cast<std::int64_t>(outcome.missed.size());
    game.total_released += released;
    game.online_max = std::max(game.online_max, outcome.machines);
    game.off_final = off;
    game.steps.push_back({t, released, outcome.machines, off, backlog});
  }
  game.missed_jobs += static_cast<std::int64_t>(algorithm.close().size());
  game.stopped_at = adversary.stopped_at();
  game.ratio = game.off_final > 0
                   ? static_cast<double>(game.online_max) / static_cast<double>(game.off_final)
                   : 0.0;
  return game;
}

nlohmann::json game_to_json(const GameTranscript& game) {
  auto steps = nlohmann::json::array();
  for (const auto& s : game.steps) {
    steps.push_back({{"t", s.t},
                     {"released", s.released},
                     {"ONLINE", s.online},
                     {"OFF", s.off},
                     {"backlog", s.backlog}});
  }
  nlohmann::json outcome;
  if (game.stopped_at) {
    outcome = {{"kind", "stopped"}, {"tau", *game.stopped_at}};
  } else {
    outcome = {{"kind", "ran-to-end"}};
  }
  return {{"n", game.n},
          {"N", game.big_n},
          {"rho", game.rho.to_string()},
          {"algorithm", game.algorithm},
          {"outcome", outcome},
          {"online", game.online_max},
          {"OFF", game.off_final},
          {"ratio", game.ratio},
          {"released", game.total_released},
          {"missed", game.missed()},
          {"missed_jobs", game.missed_jobs},
          {"steps", std::move(steps)}};
}

std::vector<std::int64_t> off_series_reference(std::span<const std::int64_t> releases,
                                               std::int64_t n) {
  std::vector<std::int64_t> series(releases.size(), 0);
  for (std::size_t t = 0; t < releases.size(); ++t) {
    __int128 window = 0;
    std::int64_t best = 0;
    for (std::size_t s = t + 1; s-- > 0;) {
      window += releases[s];
      const __int128 span = n - static_cast<std::int64_t>(s);
      best = std::max(best, static_cast<std::int64_t>((window + span - 1) / span));
    }
    series[t] = best;
  }
  return series;
}

std::vector<std::int64_t> off_series_incremental(std::span<const std::int64_t> releases,
                                                 std::int64_t n) {
  require_nondecreasing(releases);
  const auto prefix = prefix_sums(releases);
  std::vector<std::int64_t> series(releases.size(), 0);
  std::int64_t last = 0;
  for (std::size_t t = 0; t < releases.size(); ++t) {
    last = bisect_off(releases, prefix, n, static_cast<Step>(t), last);
    series[t] = last;
  }
  return series;
}

std::vector<std::int64_t> off_series_parallel(std::span<const std::int64_t> releases,
                                              std::int64_t n) {
  require_nondecreasing(releases);
  const auto prefix = prefix_sums(releases);
  const auto size = static_cast<std::int64_t>(releases.size());
  std::vector<std::int64_t> series(releases.size(), 0);
  const std::int64_t chunks =
      std::min<std::int64_t>(size, static_cast<std::int64_t>(omp_get_max_threads()) * 4);

#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t c = 0; c < chunks; ++c) {
    const auto begin = size * c / chunks;
    const auto end = size * (c + 1) / chunks;
    std::int64_t last = 0;
    for (auto t = begin; t < end; ++t) {
      last = bisect_off(releases, prefix, n, t, last);
      series[static_cast<std::size_t>(t)] = last;
    }
  }
  return series;
}

AggregateResult aggregate_game(Factor alpha, std::int64_t n, std::int64_t big_n, Factor rho) {
  check_params(n, big_n);
  AggregateResult result;
  result.n = n;
  result.big_n = big_n;
  result.alpha = alpha;
  result.released.resize(static_cast<std::size_t>(n));
  for (Step t = 0; t < n; ++t) {
    result.released[static_cast<std::size_t>(t)] = release_count(n, big_n, t);
  }
  result.off = off_series_parallel(result.released, n);
  result.online.resize(static_cast<std::size_t>(n));

  // OFF(t) for t <= tau depends only on releases up to t, so the stop step can
  // be located on the unstopped series and everything after it frozen.
  for (Step t = 0; t < n; ++t) {
    auto& off = result.off[static_cast<std::size_t>(t)];
    if (result.stopped_at) {
      off = result.off[static_cast<std::size_t>(*result.stopped_at)];
      result.released[static_cast<std::size_t>(t)] = 0;
    }
    result.online[static_cast<std::size_t>(t)] = alpha.ceil_mul(off);
    if (!result.stopped_at && rho.reached_by(result.online[static_cast<std::size_t>(t)], off)) {
      result.stopped_at = t;
    }
  }

  result.backlog.resize(static_cast<std::size_t>(n));
  __int128 pending = 0;
  for (Step t = 0; t < n; ++t) {
    const auto i = static_cast<std::size_t>(t);
    pending += result.released[i];
    result.total_released += result.released[i];
    const __int128 done = std::min<__int128>(pending, result.online[i]);
    pending -= done;
    result.total_processed += done;
    result.backlog[i] = static_cast<std::int64_t>(pending);
  }
  return result;
}

void write_aggregate_csv(const AggregateResult& result, std::ostream& out) {
  out << "t,a_t,OFF,ONLINE,backlog\n";
  for (std::size_t t = 0; t < result.off.size(); ++t) {
    out << t << ',' << result.released[t] << ',' << result.off[t] << ',' << result.online[t]
        << ',' << result.backlog[t] << '\n';
  }
}

namespace {

long double released_lower_bound(long double n, long double big_n) {
  return big_n * std::log(n) - (n - 1.0L);
}

long double processed_upper_bound(long double n, long double big_n, long double alpha) {
  const long double e = std::numbers::e_v<long double>;
  return (alpha / e) * big_n * std::log(n) + big_n + alpha * n;
}

bool released_exceeds(long double n, long double alpha) {
  const long double big_n = n * n;
  return released_lower_bound(n, big_n) > processed_upper_bound(n, big_n, alpha);
}

}  // namespace

CountingBounds counting_bounds(std::int64_t n, std::int64_t big_n, Factor alpha) {
  if (n < 2) throw ContractViolation("counting bounds need n >= 2");
  const long double a = alpha.kind() == Factor::Kind::Euler ? std::numbers::e_v<long double>
                                                            : static_cast<long double>(alpha.value());
  CountingBounds bounds;
  bounds.n = n;
  bounds.big_n = big_n;
  bounds.epsilon = static_cast<double>(std::numbers::e_v<long double> - a);
  bounds.released_lower =
      released_lower_bound(static_cast<long double>(n), static_cast<long double>(big_n));
  bounds.processed_upper =
      processed_upper_bound(static_cast<long double>(n), static_cast<long double>(big_n), a);

  if (a < std::numbers::e_v<long double>) {
    constexpr std::int64_t kSearchCap = std::int64_t{1} << 50;
    std::int64_t hi = 2;
    while (hi < kSearchCap && !released_exceeds(static_cast<long double>(hi), a)) hi *= 2;
    if (released_exceeds(static_cast<long double>(hi), a)) {
      std::int64_t lo = hi / 2;  // lo fails (or is below 2)
      while (hi - lo > 1) {
        const auto mid = lo + (hi - lo) / 2;
        if (released_exceeds(static_cast<long double>(mid), a)) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      bounds.crossover = hi;
    }
  }
  return bounds;
}

std::int64_t ceil_over_e(std::int64_t numerator, std::int64_t x) {
  if (x <= 0) throw ContractViolation("ceil_over_e needs x > 0");
  const Wide value = Wide(numerator) / (boost::math::constants::e<Wide>() * Wide(x));
  return ceil(value).convert_to<std::int64_t>();
}

Witness offline_witness(std::int64_t n, std::int64_t big_n, Step t_star) {
  check_params(n, big_n);
  if (t_star < 0 || t_star >= n) throw ContractViolation("t* must lie in [0, n-1]");
  Witness witness;
  witness.machines = ceil_over_e(big_n, n - t_star);

  constexpr std::int64_t kMaterializeCap = 4'000'000;
  std::int64_t total = 0;
  for (Step t = 0; t <= t_star; ++t) total += release_count(n, big_n, t);
  witness.jobs = total;
  const bool materialize = total <= kMaterializeCap;

  // Jobs run first-come first-served; ids follow release order.
  std::int64_t released = 0;
  JobId next_to_run = 0;
  for (Step t = 0; t < n; ++t) {
    if (t <= t_star) released += release_count(n, big_n, t);
    const auto run = std::min(witness.machines, released - next_to_run);
    if (materialize) {
      for (std::int64_t i = 0; i < run; ++i) {
        witness.schedule.assignments.push_back({next_to_run + i, i, Rational(t), Rational(t + 1)});
      }
    }
    next_to_run += run;
  }
  witness.feasible = next_to_run == released;
  if (materialize) {
    for (JobId id = next_to_run; id < released; ++id) witness.schedule.misses.push_back(id);
  }
  return witness;
}

std::vector<EnvelopePoint> lemma3_envelope(std::int64_t n, std::int64_t big_n, Step from, Step to) {
  check_params(n, big_n);
  from = std::max<Step>(from, 0);
  to = std::min<Step>(to, n - 1);
  std::vector<EnvelopePoint> points;
  oracle::OffTracker tracker;
  for (Step t = 0; t <= to; ++t) {
    tracker.add(t, n, release_count(n, big_n, t));
    if (t < from) continue;
    points.push_back({t, tracker.off(), ceil_over_e(big_n, n - t)});
  }
  return points;
}

}  // namespace sched::adversary
