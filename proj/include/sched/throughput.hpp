#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sched/core.hpp"

namespace sched::throughput {

struct OfflineVertex {
  JobId job = 0;
  Rational weight{1};
  Step reveal = 0;
};

struct OnlineVertex {
  Step t = 0;
  MachineId machine = 0;
  std::size_t group = 0;  // index of the shared neighborhood
};

/// Bipartite view of a throughput instance. Offline vertex u is indexed by
/// its position (jobs sorted by id); online vertices arrive ordered by
/// (t, machine), k per step, skipping steps with no live job.
class MatchingInstance {
 public:
  MatchingInstance() = default;
  MatchingInstance(std::int64_t k, std::vector<OfflineVertex> offline,
                   std::vector<Step> steps, std::vector<std::vector<std::size_t>> neighborhoods);

  std::int64_t machines() const { return k_; }
  std::span<const OfflineVertex> offline() const { return offline_; }
  std::span<const OnlineVertex> online() const { return online_; }
  std::span<const Step> steps() const { return steps_; }
  /// Offline neighbors of online vertex v, ascending.
  std::span<const std::size_t> neighbors(std::size_t v) const;
  bool adjacent(std::size_t u, std::size_t v) const;
  /// Online vertex index of (t, machine), or npos.
  std::size_t online_index(Step t, MachineId machine) const;
  std::size_t offline_index(JobId job) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::int64_t k_ = 0;
  std::vector<OfflineVertex> offline_;
  std::vector<Step> steps_;
  std::vector<std::vector<std::size_t>> neighborhoods_;
  std::vector<OnlineVertex> online_;
};

struct Matching {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (u, v), ordered by v
  Rational weight{0};
};

MatchingInstance reduce_to_matching(const Instance& instance);

/// Throws ContractViolation unless every pair is an edge and each side is used once.
void check_matching(const MatchingInstance& minstance, const Matching& matching);

/// Matched u on v becomes the job in slot t(v) on machine(v). Assignments are
/// ordered by (slot, machine); throughput schedules carry no misses.
Schedule matching_to_schedule(const MatchingInstance& minstance, const Matching& matching);
Matching schedule_to_matching(const MatchingInstance& minstance, const Schedule& schedule);

/// Each u draws x_u in [0, 1) at its reveal; arriving v takes the unmatched
/// neighbor maximizing w_u (1 - exp(x_u - 1)), ties by lowest u.
Matching perturbed_greedy(const MatchingInstance& minstance, std::uint64_t seed);

/// Arriving v takes the heaviest unmatched neighbor, ties by lowest u.
Matching greedy_baseline(const MatchingInstance& minstance);

/// EDF on k machines; refuses instances whose weights are not all equal.
Schedule edf_throughput_unweighted(const Instance& instance);

Rational schedule_weight(const Instance& instance, const Schedule& schedule);

enum class Algorithm { PerturbedGreedy, Greedy };
std::string_view to_string(Algorithm algorithm);
std::optional<Algorithm> parse_algorithm(std::string_view text);

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t trial);

struct RatioEstimate {
  double mean = 0.0;
  Rational opt{0};
  double ratio = 0.0;
  double stderr_ = 0.0;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
};

/// Serial reference.
RatioEstimate estimate_ratio(const Instance& instance, Algorithm algorithm, std::int64_t trials,
                             std::uint64_t seed);
/// OpenMP over trials; bit-identical to the serial version.
RatioEstimate estimate_ratio_parallel(const Instance& instance, Algorithm algorithm,
                                      std::int64_t trials, std::uint64_t seed);

nlohmann::json matching_instance_to_json(const MatchingInstance& minstance);
nlohmann::json matching_to_json(const Matching& matching);

}  // namespace sched::throughput
