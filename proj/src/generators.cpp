#include "sched/generators.hpp"

#include <algorithm>
#include <bit>
#include <random>

#include "sched/adversary.hpp"

namespace sched::gen {

namespace {

std::int64_t uniform(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

void require(bool ok, const char* what) {
  if (!ok) throw ContractViolation(what);
}

Step max_deadline(const Instance& instance) {
  Step horizon = 0;
  for (const auto& job : instance.jobs) horizon = std::max(horizon, ceil_int(job.deadline));
  return horizon;
}

}  // namespace

std::string_view to_string(Kind kind) {
  switch (kind) {
    case Kind::Adversary: return "adversary";
    case Kind::RandomUnit: return "random-unit";
    case Kind::EqualDeadline: return "equal-deadline";
    case Kind::Throughput: return "throughput";
    case Kind::UpperTriangular: return "upper-triangular";
  }
  return "?";
}

std::optional<Kind> parse_kind(std::string_view text) {
  for (auto kind : {Kind::Adversary, Kind::RandomUnit, Kind::EqualDeadline, Kind::Throughput,
                    Kind::UpperTriangular}) {
    if (text == to_string(kind)) return kind;
  }
  return std::nullopt;
}

void check(const Params& p) {
  switch (p.kind) {
    case Kind::Adversary:
      require(p.n >= 1, "adversary needs n >= 1");
      require(p.big_n >= 1, "adversary needs N >= 1");
      break;
    case Kind::RandomUnit:
      require(p.n >= 0, "random-unit needs n >= 0");
      require(p.horizon >= 1, "random-unit needs horizon >= 1");
      break;
    case Kind::EqualDeadline:
      require(p.kappa >= 1 && p.kappa <= 30, "equal-deadline needs 1 <= kappa <= 30");
      require(p.n >= 0, "equal-deadline needs n >= 0");
      break;
    case Kind::Throughput:
      require(p.n >= 0, "throughput needs n >= 0");
      require(p.horizon >= 1, "throughput needs horizon >= 1");
      require(p.k >= 1, "throughput needs k >= 1");
      require(p.w_min >= 0 && p.w_min <= p.w_max, "throughput needs 0 <= w-min <= w-max");
      break;
    case Kind::UpperTriangular:
      require(p.k >= 1, "upper-triangular needs k >= 1");
      require(p.levels >= 1, "upper-triangular needs levels >= 1");
      break;
  }
}

Instance generate(const Params& p) {
  check(p);
  switch (p.kind) {
    case Kind::Adversary: return adversary::adversary_instance(p.n, p.big_n);
    case Kind::RandomUnit: return random_unit(p.n, p.horizon, p.seed);
    case Kind::EqualDeadline: return equal_deadline(p.kappa, p.n, p.seed);
    case Kind::Throughput: return throughput(p.n, p.horizon, p.k, p.w_min, p.w_max, p.seed);
    case Kind::UpperTriangular: return upper_triangular(p.k, p.levels);
  }
  throw ContractViolation("unknown generator kind");
}

Instance random_unit(std::int64_t jobs, Step horizon, std::uint64_t seed) {
  check({.kind = Kind::RandomUnit, .n = jobs, .horizon = horizon});
  std::mt19937_64 rng(seed);
  Instance instance;
  instance.model = Model::UnitMin;
  for (JobId id = 0; id < jobs; ++id) {
    const auto r = uniform(rng, 0, horizon - 1);
    const auto d = uniform(rng, r + 1, horizon);
    instance.jobs.push_back({id, Rational(r), Rational(d), Rational(1), Rational(1)});
  }
  normalize(instance);
  instance.horizon = max_deadline(instance);
  return instance;
}

Instance equal_deadline(int kappa, std::int64_t jobs, std::uint64_t seed) {
  check({.kind = Kind::EqualDeadline, .n = jobs, .kappa = kappa});
  std::mt19937_64 rng(seed);
  const std::int64_t d = (std::int64_t{1} << kappa) - 1;
  Instance instance;
  instance.model = Model::EqualDeadline;
  instance.common_deadline = d;
  for (JobId id = 0; id < jobs; ++id) {
    const auto quarters = uniform(rng, 0, 4 * d - 1);
    const Rational r(quarters, 4);
    // Size in eighths, log-uniform over its magnitude.
    const auto cap = 2 * (4 * d - quarters);
    const int top = std::bit_width(static_cast<std::uint64_t>(cap)) - 1;
    const auto e = uniform(rng, 0, top);
    const auto lo = std::int64_t{1} << e;
    const auto hi = std::min(cap, (lo << 1) - 1);
    const Rational size(uniform(rng, lo, hi), 8);
    instance.jobs.push_back({id, r, Rational(d), size, Rational(1)});
  }
  normalize(instance);
  return instance;
}

Instance throughput(std::int64_t jobs, Step horizon, std::int64_t k, std::int64_t w_min,
                    std::int64_t w_max, std::uint64_t seed) {
  check({.kind = Kind::Throughput, .n = jobs, .horizon = horizon, .k = k, .w_min = w_min,
         .w_max = w_max});
  std::mt19937_64 rng(seed);
  Instance instance;
  instance.model = Model::Throughput;
  instance.machines = k;
  for (JobId id = 0; id < jobs; ++id) {
    const auto r = uniform(rng, 0, horizon - 1);
    const auto d = uniform(rng, r + 1, horizon);
    const auto w = uniform(rng, w_min, w_max);
    instance.jobs.push_back({id, Rational(r), Rational(d), Rational(1), Rational(w)});
  }
  normalize(instance);
  instance.horizon = max_deadline(instance);
  return instance;
}

Instance upper_triangular(std::int64_t k, std::int64_t levels) {
  check({.kind = Kind::UpperTriangular, .k = k, .levels = levels});
  Instance instance;
  instance.model = Model::Throughput;
  instance.machines = k;
  JobId id = 0;
  for (std::int64_t j = 1; j <= levels; ++j) {
    for (std::int64_t c = 0; c < k; ++c) {
      instance.jobs.push_back({id++, Rational(0), Rational(j), Rational(1), Rational(1)});
    }
  }
  instance.horizon = levels;
  return instance;
}

}  // namespace sched::gen
