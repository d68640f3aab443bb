#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "sched/generators.hpp"
#include "sched/oracle.hpp"
#include "sched/throughput.hpp"
#include "support/oracles.hpp"

using namespace sched;
using namespace sched::throughput;

namespace {

Instance make(std::int64_t k, const std::vector<std::tuple<Step, Step, Rational>>& jobs) {
  Instance instance;
  instance.model = Model::Throughput;
  instance.machines = k;
  JobId id = 0;
  Step horizon = 1;
  for (const auto& [r, d, w] : jobs) {
    instance.jobs.push_back({id++, Rational(r), Rational(d), Rational(1), w});
    horizon = std::max(horizon, d);
  }
  instance.horizon = horizon;
  return instance;
}

std::vector<UnitJob> units(const Instance& instance) { return to_unit_jobs(instance.jobs); }

}  // namespace

TEST_CASE("reduction: worked examples") {
  const auto m = reduce_to_matching(make(2, {{0, 2, Rational(1)}}));
  CHECK(m.online().size() == 4);
  CHECK(m.offline().size() == 1);
  for (std::size_t v = 0; v < 4; ++v) CHECK(m.adjacent(0, v));
  CHECK(m.online()[3].t == 1);
  CHECK(m.online()[3].machine == 1);
  CHECK(m.online_index(1, 0) == 2);
  CHECK(m.online_index(2, 0) == MatchingInstance::npos);
  CHECK(m.online_index(0, 2) == MatchingInstance::npos);

  const auto single = reduce_to_matching(make(1, {{0, 1, Rational(7, 2)}}));
  CHECK(single.online().size() == 1);
  CHECK(single.online()[0].t == 0);
  CHECK(single.offline()[0].weight == Rational(7, 2));
  CHECK(single.offline()[0].reveal == 0);

  const auto gap = reduce_to_matching(make(1, {{0, 1, Rational(1)}, {3, 4, Rational(1)}}));
  CHECK(gap.online().size() == 2);
  CHECK(gap.online()[1].t == 3);
  CHECK_FALSE(gap.adjacent(0, 1));
}

TEST_CASE("reduction: contract violations") {
  Instance unit;
  unit.model = Model::UnitMin;
  CHECK_THROWS_AS(reduce_to_matching(unit), ContractViolation);
  const auto m = reduce_to_matching(make(1, {{0, 1, Rational(1)}, {2, 3, Rational(1)}}));
  Matching bad;
  bad.pairs = {{0, 1}};
  bad.weight = Rational(1);
  CHECK_THROWS_AS(check_matching(m, bad), ContractViolation);
  CHECK_THROWS_AS(matching_to_schedule(m, bad), ContractViolation);
  Matching twice;
  twice.pairs = {{0, 0}, {0, 0}};
  twice.weight = Rational(2);
  CHECK_THROWS_AS(check_matching(m, twice), ContractViolation);
}

TEST_CASE("reduction: empty matching is the empty schedule") {
  const auto m = reduce_to_matching(make(3, {{0, 4, Rational(1)}}));
  const auto s = matching_to_schedule(m, Matching{});
  CHECK(s.assignments.empty());
  CHECK(s.misses.empty());
}

TEST_CASE("reduction: bijection on random instances") {
  std::mt19937_64 rng(61);
  for (int i = 0; i < 200; ++i) {
    const auto k = 1 + static_cast<std::int64_t>(rng() % 4);
    const auto instance = gen::throughput(1 + static_cast<std::int64_t>(rng() % 60),
                                          1 + static_cast<Step>(rng() % 20), k, 1, 9, rng());
    const auto m = reduce_to_matching(instance);
    for (std::size_t v = 0; v < m.online().size(); ++v) {
      const auto t = m.online()[v].t;
      for (std::size_t u = 0; u < m.offline().size(); ++u) {
        const auto& job = *std::find_if(instance.jobs.begin(), instance.jobs.end(),
                                        [&](const Job& j) { return j.id == m.offline()[u].job; });
        const bool live = job.release <= t && Rational(t + 1) <= job.deadline;
        CHECK(m.adjacent(u, v) == live);
        if (live) CHECK(m.offline()[u].reveal <= t);
      }
    }
    for (const auto& matching : {greedy_baseline(m), perturbed_greedy(m, rng())}) {
      const auto schedule = matching_to_schedule(m, matching);
      CHECK(audit_schedule(instance, schedule).ok());
      CHECK(schedule_weight(instance, schedule) == matching.weight);
      const auto back = schedule_to_matching(m, schedule);
      CHECK(back.pairs == matching.pairs);
      CHECK(back.weight == matching.weight);
      CHECK(matching_to_schedule(m, back) == schedule);
    }
  }
}

TEST_CASE("reduction: machine relabeling preserves weight") {
  std::mt19937_64 rng(62);
  for (int i = 0; i < 50; ++i) {
    const std::int64_t k = 3;
    const auto instance = gen::throughput(30, 10, k, 1, 5, rng());
    const auto m = reduce_to_matching(instance);
    auto schedule = matching_to_schedule(m, greedy_baseline(m));
    std::vector<MachineId> perm = {2, 0, 1};
    for (auto& a : schedule.assignments) a.machine = perm[static_cast<std::size_t>(a.machine)];
    const auto back = schedule_to_matching(m, schedule);
    CHECK(back.weight == schedule_weight(instance, schedule));
  }
}

TEST_CASE("greedy baseline: worked examples") {
  const auto heavy = make(1, {{0, 2, Rational(1)}, {0, 1, Rational(10)}});
  const auto g = greedy_baseline(reduce_to_matching(heavy));
  CHECK(g.weight == 11);

  const auto trap = make(1, {{0, 2, Rational(11, 10)}, {0, 1, Rational(1)}});
  CHECK(greedy_baseline(reduce_to_matching(trap)).weight == Rational(11, 10));
  CHECK(ref::throughput_opt(units(trap), 1) == Rational(21, 10));
  CHECK(oracle::offline_throughput_opt(trap).weight == Rational(21, 10));
}

TEST_CASE("perturbed greedy: equal weights, the smaller draw wins") {
  const auto two = make(1, {{0, 1, Rational(1)}, {0, 1, Rational(1)}});
  const auto m = reduce_to_matching(two);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(seed);
    const double x0 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const double x1 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const auto matching = perturbed_greedy(m, seed);
    REQUIRE(matching.pairs.size() == 1);
    CHECK(matching.pairs[0].first == (x0 <= x1 ? 0u : 1u));
  }
}

TEST_CASE("perturbed greedy: deterministic and never above OPT") {
  std::mt19937_64 rng(63);
  for (int i = 0; i < 150; ++i) {
    const auto k = 1 + static_cast<std::int64_t>(rng() % 3);
    const auto instance = gen::throughput(1 + static_cast<std::int64_t>(rng() % 11),
                                          1 + static_cast<Step>(rng() % 6), k, 1, 6, rng());
    const auto m = reduce_to_matching(instance);
    const auto seed = rng();
    const auto a = perturbed_greedy(m, seed);
    CHECK(a.pairs == perturbed_greedy(m, seed).pairs);
    const auto opt = ref::throughput_opt(units(instance), k);
    CHECK(oracle::offline_throughput_opt(instance).weight == opt);
    CHECK(a.weight <= opt);
    CHECK(greedy_baseline(m).weight <= opt);
  }
}

TEST_CASE("EDF is optimal on unweighted instances") {
  std::mt19937_64 rng(64);
  for (int i = 0; i < 300; ++i) {
    const auto k = 1 + static_cast<std::int64_t>(rng() % 3);
    const auto instance = gen::throughput(1 + static_cast<std::int64_t>(rng() % 12),
                                          1 + static_cast<Step>(rng() % 6), k, 1, 1, rng());
    const auto schedule = edf_throughput_unweighted(instance);
    CHECK(audit_schedule(instance, schedule).ok());
    CHECK(schedule_weight(instance, schedule) == ref::throughput_opt(units(instance), k));
  }
  CHECK_THROWS_AS(edf_throughput_unweighted(make(1, {{0, 1, Rational(1)}, {0, 1, Rational(2)}})),
                  ContractViolation);
}

TEST_CASE("ratio estimate: serial and parallel agree bit for bit") {
  std::mt19937_64 rng(65);
  for (int i = 0; i < 10; ++i) {
    const auto instance = gen::throughput(40, 12, 2, 1, 20, rng());
    const auto seed = rng();
    const auto s = estimate_ratio(instance, Algorithm::PerturbedGreedy, 257, seed);
    const auto p = estimate_ratio_parallel(instance, Algorithm::PerturbedGreedy, 257, seed);
    CHECK(s.mean == p.mean);
    CHECK(s.ratio == p.ratio);
    CHECK(s.stderr_ == p.stderr_);
    CHECK(s.opt == p.opt);
    CHECK(s.ratio <= 1.0);
  }
  CHECK_THROWS_AS(estimate_ratio(make(1, {{0, 1, Rational(1)}}), Algorithm::Greedy, 0, 1),
                  ContractViolation);
}

TEST_CASE("ratio estimate: upper-triangular instances clear 1 - 1/e") {
  const double floor = 1.0 - 1.0 / std::exp(1.0) - 0.02;
  for (const std::int64_t k : {1, 2, 4}) {
    for (const std::int64_t levels : {4, 8, 16}) {
      const auto instance = gen::upper_triangular(k, levels);
      const auto est = estimate_ratio_parallel(instance, Algorithm::PerturbedGreedy, 2000, 7);
      CHECK(est.opt == Rational(k * levels));
      CHECK(est.ratio >= floor);
    }
  }
}

TEST_CASE("derive_seed and algorithm names") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(5, 9) == derive_seed(5, 9));
  CHECK(parse_algorithm("greedy") == Algorithm::Greedy);
  CHECK(parse_algorithm(to_string(Algorithm::PerturbedGreedy)) == Algorithm::PerturbedGreedy);
  CHECK_FALSE(parse_algorithm("edf").has_value());
}
