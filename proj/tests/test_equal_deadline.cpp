#include <doctest.h>

#include <algorithm>
#include <random>

#include "sched/equal_deadline.hpp"
#include "sched/generators.hpp"
#include "support/oracles.hpp"

using namespace sched;
using namespace sched::equal_deadline;

namespace {

Instance make(std::int64_t d, const std::vector<std::pair<Rational, Rational>>& jobs) {
  Instance instance;
  instance.model = Model::EqualDeadline;
  instance.common_deadline = d;
  JobId id = 0;
  for (const auto& [r, p] : jobs) instance.jobs.push_back({id++, r, Rational(d), p, Rational(1)});
  return instance;
}

}  // namespace

TEST_CASE("phase bounds") {
  const auto p1 = phase_bounds(3, 1);
  CHECK(p1.start == 0);
  CHECK(p1.end == 4);
  CHECK(p1.length == 4);
  const auto p2 = phase_bounds(3, 2);
  CHECK(p2.start == 4);
  CHECK(p2.end == 6);
  const auto p3 = phase_bounds(3, 3);
  CHECK(p3.start == 6);
  CHECK(p3.end == 7);
  CHECK(p3.length == 1);
  for (int kappa = 1; kappa <= 20; ++kappa) {
    Rational cursor(0);
    for (int i = 1; i <= kappa; ++i) {
      const auto p = phase_bounds(kappa, i);
      CHECK(p.start == cursor);
      CHECK(p.length == Rational(std::int64_t{1} << (kappa - i)));
      cursor = p.end;
    }
    CHECK(cursor == Rational((std::int64_t{1} << kappa) - 1));
  }
  CHECK_THROWS_AS(phase_bounds(3, 0), ContractViolation);
  CHECK_THROWS_AS(phase_bounds(3, 4), ContractViolation);
}

TEST_CASE("kappa_of") {
  CHECK(kappa_of(1) == 1);
  CHECK(kappa_of(7) == 3);
  CHECK(kappa_of(1023) == 10);
  CHECK_THROWS_AS(kappa_of(6), ContractViolation);
  CHECK_THROWS_AS(kappa_of(0), ContractViolation);
}

TEST_CASE("classify") {
  CHECK(classify(Rational(1), Rational(4)) == JobClass::Short);
  CHECK(classify(Rational(9, 8), Rational(4)) == JobClass::Long);
  CHECK(classify(Rational(1, 4), Rational(1)) == JobClass::Short);
  CHECK(to_string(JobClass::Long) == "long");
}

TEST_CASE("single short job is postponed to the next phase") {
  const auto t = run_equal_deadline(make(7, {{Rational(0), Rational(1)}}));
  REQUIRE(t.placements.size() == 1);
  CHECK(t.placements[0].start == 4);
  CHECK(t.placements[0].end == 5);
  CHECK(t.placements[0].class_at_release == JobClass::Short);
  CHECK(t.max_concurrent == 1);
  CHECK(t.lower_bound == 1);
  CHECK(t.audit_failures.empty());
  CHECK(t.bounds_hold());
}

TEST_CASE("single long job starts at release") {
  const auto t = run_equal_deadline(make(7, {{Rational(1, 2), Rational(3)}}));
  REQUIRE(t.placements.size() == 1);
  CHECK(t.placements[0].start == Rational(1, 2));
  CHECK(t.placements[0].class_at_release == JobClass::Long);
  CHECK(t.max_concurrent == 1);
}

TEST_CASE("short jobs in the last phase are placed immediately") {
  const auto t = run_equal_deadline(make(7, {{Rational(6), Rational(1, 4)}, {Rational(6), Rational(1, 4)}}));
  REQUIRE(t.placements.size() == 2);
  CHECK(t.placements[0].machine == t.placements[1].machine);
  CHECK(t.placements[0].start == 6);
  CHECK(t.placements[1].start == Rational(25, 4));
}

TEST_CASE("scheduler contract violations") {
  PhaseScheduler s(7);
  s.on_release({0, Rational(2), Rational(7), Rational(1), Rational(1)});
  CHECK_THROWS_AS(s.on_release({1, Rational(1), Rational(7), Rational(1), Rational(1)}), ContractViolation);
  CHECK_THROWS_AS(s.on_release({2, Rational(3), Rational(6), Rational(1), Rational(1)}), ContractViolation);
  CHECK_THROWS_AS(s.on_release({3, Rational(5), Rational(7), Rational(3), Rational(1)}), ContractViolation);
  CHECK_THROWS_AS(PhaseScheduler(6), ContractViolation);
  Instance unit;
  unit.model = Model::UnitMin;
  CHECK_THROWS_AS(run_equal_deadline(unit), ContractViolation);
}

TEST_CASE("random instances: valid, audited, within bounds, deterministic") {
  std::mt19937_64 rng(51);
  for (int i = 0; i < 300; ++i) {
    const int kappa = 1 + static_cast<int>(rng() % 7);
    const auto instance = gen::equal_deadline(kappa, 1 + static_cast<std::int64_t>(rng() % 150), rng());
    const auto t = run_equal_deadline(instance);
    CHECK(ref::valid_schedule(instance.jobs, t.schedule, true));
    CHECK(audit_schedule(instance, t.schedule).ok());
    CHECK(t.audit_failures.empty());
    CHECK(t.lower_bound == ref::volume_lb(instance.jobs, *instance.common_deadline));
    for (const auto& p : t.phases) {
      CHECK(p.m_short <= 8 * t.lower_bound + 1);
      CHECK(p.m_long <= 8 * t.lower_bound);
    }
    CHECK(t.max_concurrent <= 16 * t.lower_bound + 1);
    CHECK(t.bounds_hold());
    CHECK(transcript_to_json(run_equal_deadline(instance)) == transcript_to_json(t));
  }
}

TEST_CASE("transcript JSON shape") {
  const auto t = run_equal_deadline(gen::equal_deadline(4, 30, 5));
  const auto doc = transcript_to_json(t);
  CHECK(doc.at("phases").size() == 4);
  CHECK(doc.at("jobs").size() == 30);
  CHECK(doc.at("d") == 15);
  CHECK(doc.at("phases")[0].contains("M_short"));
}
