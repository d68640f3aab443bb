#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include <json.hpp>

#include "sched/core.hpp"
#include "sched/factor.hpp"
#include "sched/online_min.hpp"

namespace sched::adversary {

/// floor(N / (n - t)), the number of jobs released at step t.
std::int64_t release_count(std::int64_t n, std::int64_t big_n, Step t);

/// Adaptive lower-bound adversary: releases floor(N / (n - t)) unit jobs with
/// deadline n at each step until the online algorithm reaches rho * OFF.
class Adversary {
 public:
  Adversary(std::int64_t n, std::int64_t big_n, Factor rho = Factor::euler());

  /// Jobs released at step t (none once stopped). Ids are issued sequentially.
  std::vector<UnitJob> release(Step t);
  /// Observes ONLINE(t) and OFF(t) after the algorithm acted at step t.
  void observe(Step t, std::int64_t online, std::int64_t off);

  std::optional<Step> stopped_at() const { return stopped_at_; }
  std::int64_t n() const { return n_; }
  std::int64_t big_n() const { return big_n_; }

 private:
  std::int64_t n_;
  std::int64_t big_n_;
  Factor rho_;
  std::optional<Step> stopped_at_;
  JobId next_id_ = 0;
};

/// All jobs the adversary would release without stopping (the "gen" instance).
std::vector<UnitJob> adversary_jobs(std::int64_t n, std::int64_t big_n);
Instance adversary_instance(std::int64_t n, std::int64_t big_n);

struct GameStep {
  Step t = 0;
  std::int64_t released = 0;
  std::int64_t online = 0;
  std::int64_t off = 0;
  std::int64_t backlog = 0;
};

struct GameTranscript {
  std::int64_t n = 0;
  std::int64_t big_n = 0;
  Factor rho = Factor::euler();
  std::string algorithm;
  std::vector<GameStep> steps;
  std::optional<Step> stopped_at;
  std::int64_t online_max = 0;
  std::int64_t off_final = 0;
  double ratio = 0.0;
  std::int64_t total_released = 0;
  std::int64_t missed_jobs = 0;

  bool missed() const { return missed_jobs > 0; }
};

/// Exact game. Turn order per step: adversary releases, algorithm acts,
/// adversary observes. OFF(t) is audited with the exact offline oracle.
GameTranscript play_game(online::OnlineMinimizer& algorithm, std::int64_t n, std::int64_t big_n,
                         Factor rho = Factor::euler());

nlohmann::json game_to_json(const GameTranscript& game);

// Aggregate game: all jobs share deadline n, so EDF is FIFO on counts and
// OFF(t) = max_{s<=t} ceil(sum_{u=s..t} a_u / (n - s)).

/// O(n^2) direct suffix-demand maximization; reference for small n.
std::vector<std::int64_t> off_series_reference(std::span<const std::int64_t> releases,
                                               std::int64_t n);
/// Warm-started serial sweep; releases must be nondecreasing.
std::vector<std::int64_t> off_series_incremental(std::span<const std::int64_t> releases,
                                                 std::int64_t n);
/// OpenMP kernel: one bisection per chunk start, warm-started within chunks.
std::vector<std::int64_t> off_series_parallel(std::span<const std::int64_t> releases,
                                              std::int64_t n);

struct AggregateResult {
  std::int64_t n = 0;
  std::int64_t big_n = 0;
  Factor alpha = Factor::euler();
  std::optional<Step> stopped_at;
  std::vector<std::int64_t> released;
  std::vector<std::int64_t> off;
  std::vector<std::int64_t> online;
  std::vector<std::int64_t> backlog;  // after step t
  __int128 total_released = 0;
  __int128 total_processed = 0;

  std::int64_t final_backlog() const { return backlog.empty() ? 0 : backlog.back(); }
  bool missed() const { return final_backlog() > 0; }
};

/// Counter simulation of alpha-EDF against the adversary. rho = infinity
/// disables the stop rule.
AggregateResult aggregate_game(Factor alpha, std::int64_t n, std::int64_t big_n,
                               Factor rho = Factor::infinity());

/// CSV rows {t, a_t, OFF, ONLINE, backlog}.
void write_aggregate_csv(const AggregateResult& result, std::ostream& out);

struct CountingBounds {
  std::int64_t n = 0;
  std::int64_t big_n = 0;
  double epsilon = 0.0;
  long double released_lower = 0.0L;   // N ln n - (n - 1)
  long double processed_upper = 0.0L;  // (1 - eps/e) N ln n + N + alpha n
  std::optional<std::int64_t> crossover;  // least n (with N = n^2) where released > processed
};

/// alpha = e - epsilon. The O(n) term of the processed bound is taken as alpha * n.
CountingBounds counting_bounds(std::int64_t n, std::int64_t big_n, Factor alpha);

struct Witness {
  std::int64_t machines = 0;
  bool feasible = false;
  Schedule schedule;
  std::int64_t jobs = 0;
};

/// Greedy constant-m schedule of J(t*) with m = ceil(N / (e (n - t*))).
Witness offline_witness(std::int64_t n, std::int64_t big_n, Step t_star);

struct EnvelopePoint {
  Step t_star = 0;
  std::int64_t off = 0;
  std::int64_t bound = 0;
  bool holds() const { return off <= bound; }
};

/// Exact OFF(t*) against ceil(N / (e (n - t*))) for t* in [from, to].
std::vector<EnvelopePoint> lemma3_envelope(std::int64_t n, std::int64_t big_n, Step from, Step to);

/// ceil(N / (e * x)) evaluated in extended precision.
std::int64_t ceil_over_e(std::int64_t numerator, std::int64_t x);

}  // namespace sched::adversary
