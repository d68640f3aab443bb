#include <doctest.h>

#include <random>

#include "sched/adversary.hpp"
#include "sched/generators.hpp"
#include "sched/online_min.hpp"
#include "sched/oracle.hpp"
#include "support/oracles.hpp"

using namespace sched;
using namespace sched::online;

TEST_CASE("alpha-edf step: worked examples") {
  {
    AlphaEdf algo(Factor::euler());
    const std::vector<UnitJob> jobs = {{0, 0, 1, Rational(1)}};
    const auto out = algo.step(0, jobs);
    CHECK(out.off == 1);
    CHECK(out.machines == 3);
    CHECK(out.scheduled == std::vector<JobId>{0});
  }
  {
    AlphaEdf algo(Factor::exact(Rational(1)));
    const std::vector<UnitJob> jobs = {{0, 0, 1, Rational(1)}, {1, 0, 1, Rational(1)}};
    const auto out = algo.step(0, jobs);
    CHECK(out.off == 2);
    CHECK(out.machines == 2);
    CHECK(out.scheduled.size() == 2);
  }
}

TEST_CASE("alpha-edf step: contract violations") {
  AlphaEdf algo(Factor::euler());
  CHECK_THROWS_AS(algo.step(1, {}), ContractViolation);
  algo.step(0, {});
  const std::vector<UnitJob> stale = {{0, 0, 3, Rational(1)}};
  CHECK_THROWS_AS(algo.step(1, stale), ContractViolation);
  CHECK_THROWS_AS(algo.step(0, {}), ContractViolation);
}

TEST_CASE("run_alpha_edf: adversary(4,16)") {
  const auto jobs = adversary::adversary_jobs(4, 16);
  const auto t = run_alpha_edf(jobs, Factor::euler());
  CHECK(t.feasible());
  CHECK(t.profile.counts().size() == 4);
  CHECK(std::vector<std::int64_t>(t.profile.counts().begin(), t.profile.counts().end()) ==
        std::vector<std::int64_t>{3, 9, 14, 44});
  CHECK(t.cost == 44);
  CHECK(t.off_final == 16);

  const auto slow = run_alpha_edf(jobs, Factor::exact(Rational(1)));
  CHECK_FALSE(slow.feasible());
  CHECK(slow.misses.size() == 33 - 25);
}

TEST_CASE("run_alpha_edf: single job") {
  const std::vector<UnitJob> jobs = {{0, 0, 1, Rational(1)}};
  const auto t = run_alpha_edf(jobs, Factor::euler());
  CHECK(t.cost == 3);
  CHECK(t.feasible());
}

TEST_CASE("run_alpha_edf: alpha = e properties on random instances") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 300; ++i) {
    const auto instance = gen::random_unit(static_cast<std::int64_t>(rng() % 120), 1 + static_cast<Step>(rng() % 40), rng());
    const auto t = run_alpha_edf(instance, Factor::euler());
    const auto jobs = to_unit_jobs(instance.jobs);
    CHECK(t.feasible());
    CHECK(audit_schedule(instance, t.schedule).ok());
    const auto off = ref::off(jobs);
    CHECK(t.off_final == off);
    CHECK(t.cost == Factor::euler().ceil_mul(off));
    if (off > 0) CHECK(static_cast<double>(t.cost) / static_cast<double>(off) <= std::exp(1.0) + 1.0 / static_cast<double>(off));
    for (std::size_t s = 0; s < t.steps.size(); ++s) {
      CHECK(t.steps[s].machines == Factor::euler().ceil_mul(t.steps[s].off));
      if (s > 0) CHECK(t.steps[s].machines >= t.steps[s - 1].machines);
      std::vector<UnitJob> prefix;
      for (const auto& j : jobs) {
        if (j.release <= static_cast<Step>(s)) prefix.push_back(j);
      }
      CHECK(t.steps[s].off == ref::off(prefix));
    }
  }
}

TEST_CASE("run_alpha_edf: misses are data, every job accounted for") {
  std::mt19937_64 rng(22);
  for (int i = 0; i < 200; ++i) {
    const auto instance = gen::random_unit(static_cast<std::int64_t>(rng() % 80), 1 + static_cast<Step>(rng() % 20), rng());
    const auto t = run_alpha_edf(instance, Factor::exact(Rational(1, 2)));
    CHECK(audit_schedule(instance, t.schedule).ok());
    CHECK(t.schedule.assignments.size() + t.misses.size() == instance.jobs.size());
  }
}

TEST_CASE("transcript JSON round trip") {
  const auto t = run_alpha_edf(adversary::adversary_jobs(5, 25), Factor::euler());
  const auto doc = transcript_to_json(t);
  CHECK(doc.at("steps").size() == 5);
  CHECK(doc.at("steps")[0].at("m") == 3);
  const auto back = transcript_from_json(doc);
  CHECK(back.profile == t.profile);
  CHECK(back.off_series == t.off_series);
  CHECK(back.cost == t.cost);
  CHECK(back.misses == t.misses);
  CHECK(back.alpha == t.alpha);
  CHECK(transcript_to_json(back) == doc);
}
