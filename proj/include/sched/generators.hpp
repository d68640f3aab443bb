#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "sched/core.hpp"

namespace sched::gen {

enum class Kind { Adversary, RandomUnit, EqualDeadline, Throughput, UpperTriangular };
std::string_view to_string(Kind kind);
std::optional<Kind> parse_kind(std::string_view text);

struct Params {
  Kind kind = Kind::RandomUnit;
  std::int64_t n = 0;        // adversary steps, or job count for random kinds
  std::int64_t big_n = 0;    // adversary N
  std::int64_t horizon = 0;  // random-unit and throughput
  int kappa = 0;             // equal-deadline
  std::int64_t k = 1;        // throughput machines
  std::int64_t w_min = 1;
  std::int64_t w_max = 1;
  std::int64_t levels = 0;   // upper-triangular
  std::uint64_t seed = 0;
};

/// Throws ContractViolation naming the first bad parameter.
void check(const Params& params);

/// Deterministic in params (including seed); the result always validates.
Instance generate(const Params& params);

Instance random_unit(std::int64_t jobs, Step horizon, std::uint64_t seed);
/// d = 2^kappa - 1, releases on a 1/4 grid, sizes multiples of 1/8 with d - r as cap.
Instance equal_deadline(int kappa, std::int64_t jobs, std::uint64_t seed);
Instance throughput(std::int64_t jobs, Step horizon, std::int64_t k, std::int64_t w_min,
                    std::int64_t w_max, std::uint64_t seed);
/// k unit jobs with window [0, j) for each j in 1..levels, on k machines.
Instance upper_triangular(std::int64_t k, std::int64_t levels);

}  // namespace sched::gen
