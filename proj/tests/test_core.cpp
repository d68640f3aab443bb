#include <doctest.h>

#include <random>

#include "sched/core.hpp"
#include "sched/factor.hpp"
#include "sched/generators.hpp"
#include "sched/instance_io.hpp"

using namespace sched;

namespace {

Instance unit_instance(std::vector<Job> jobs) {
  Instance instance;
  instance.model = Model::UnitMin;
  instance.jobs = std::move(jobs);
  return instance;
}

Job job(JobId id, Rational r, Rational d, Rational p = Rational(1), Rational w = Rational(1)) {
  return {id, r, d, p, w};
}

}  // namespace

TEST_CASE("validate: a well-formed unit instance passes") {
  const auto instance = unit_instance({job(0, 0, 1), job(1, 0, 2)});
  CHECK(validate_instance(instance).ok());
}

TEST_CASE("validate: each rule fires on its own defect") {
  CHECK(validate_instance(unit_instance({job(-1, 0, 1)})).has("NegativeId"));
  CHECK(validate_instance(unit_instance({job(0, 0, 1), job(0, 0, 2)})).has("DuplicateId"));
  CHECK(validate_instance(unit_instance({job(0, -1, 1)})).has("NegativeRelease"));
  CHECK(validate_instance(unit_instance({job(0, 0, 1, Rational(1), Rational(-1))})).has("NegativeWeight"));
  CHECK(validate_instance(unit_instance({job(0, 0, 0)})).has("NonPositiveDeadline"));
  CHECK(validate_instance(unit_instance({job(0, 1, 1)})).has("WindowTooSmall"));
  CHECK(validate_instance(unit_instance({job(0, 0, 3, Rational(2))})).has("NonUnitLength"));
  CHECK(validate_instance(unit_instance({job(0, Rational(1, 2), 3)})).has("NonIntegralTime"));
  CHECK(validate_instance(unit_instance({job(0, 1, 2), job(1, 0, 2)})).has("UnsortedJobs"));

  auto beyond = unit_instance({job(0, 0, 5)});
  beyond.horizon = 4;
  CHECK(validate_instance(beyond).has("BeyondHorizon"));

  Instance tp;
  tp.model = Model::Throughput;
  tp.jobs = {job(0, 0, 1)};
  CHECK(validate_instance(tp).has("MissingMachineCount"));
  tp.machines = 0;
  CHECK(validate_instance(tp).has("NonPositiveMachineCount"));
  tp.machines = 2;
  CHECK(validate_instance(tp).ok());
}

TEST_CASE("validate: equal-deadline constraints") {
  Instance ed;
  ed.model = Model::EqualDeadline;
  ed.jobs = {job(0, 0, 7, Rational(3, 8)), job(1, 1, 7, Rational(1, 2))};
  CHECK(validate_instance(ed).ok());

  ed.jobs[1].deadline = 6;
  CHECK(validate_instance(ed).has("UnequalDeadline"));

  ed.jobs = {job(0, 0, 6)};
  CHECK(validate_instance(ed).has("BadCommonDeadline"));

  ed.jobs.clear();
  CHECK(validate_instance(ed).has("MissingCommonDeadline"));
  ed.common_deadline = 15;
  CHECK(validate_instance(ed).ok());
}

TEST_CASE("feasible_slot uses the completion-deadline convention") {
  const UnitJob j{0, 2, 5, Rational(1)};
  CHECK_FALSE(feasible_slot(j, 1));
  CHECK(feasible_slot(j, 2));
  CHECK(feasible_slot(j, 4));
  CHECK_FALSE(feasible_slot(j, 5));
  CHECK(feasible_slot(UnitJob{1, 0, 1, Rational(1)}, 0));
}

TEST_CASE("schedule_cost counts peak concurrency and rejects overlap") {
  Schedule s;
  s.assignments = {{0, 0, 0, 1}, {1, 1, 0, 1}, {2, 0, 1, 2}};
  CHECK(schedule_cost(s) == 2);

  Schedule touching;
  touching.assignments = {{0, 0, Rational(0), Rational(1, 2)}, {1, 1, Rational(1, 2), Rational(1)}};
  CHECK(schedule_cost(touching) == 1);

  Schedule clash;
  clash.assignments = {{0, 0, 0, 2}, {1, 0, 1, 2}};
  CHECK_THROWS_AS(schedule_cost(clash), ContractViolation);
  CHECK(schedule_cost(Schedule{}) == 0);
}

TEST_CASE("audit_schedule flags every broken rule") {
  const auto instance = unit_instance({job(0, 1, 3), job(1, 1, 3)});
  Schedule good;
  good.assignments = {{0, 0, 1, 2}, {1, 0, 2, 3}};
  CHECK(audit_schedule(instance, good).ok());

  Schedule early;
  early.assignments = {{0, 0, 0, 1}};
  early.misses = {1};
  CHECK(audit_schedule(instance, early).has("StartsBeforeRelease"));

  Schedule late;
  late.assignments = {{0, 0, 3, 4}};
  late.misses = {1};
  CHECK(audit_schedule(instance, late).has("MissesDeadline"));

  Schedule overlap;
  overlap.assignments = {{0, 0, 1, 2}, {1, 0, 1, 2}};
  CHECK(audit_schedule(instance, overlap).has("Overlap"));

  Schedule missing;
  missing.assignments = {{0, 0, 1, 2}};
  CHECK(audit_schedule(instance, missing).has("Unaccounted"));

  Schedule both;
  both.assignments = {{0, 0, 1, 2}, {1, 1, 1, 2}};
  both.misses = {1};
  CHECK(audit_schedule(instance, both).has("AssignedAndMissed"));

  Schedule twice;
  twice.assignments = {{0, 0, 1, 2}, {0, 1, 2, 3}, {1, 2, 1, 2}};
  CHECK(audit_schedule(instance, twice).has("DuplicateAssignment"));

  Schedule ghost;
  ghost.assignments = {{0, 0, 1, 2}, {1, 0, 2, 3}, {9, 1, 1, 2}};
  CHECK(audit_schedule(instance, ghost).has("UnknownJob"));

  Schedule wrong;
  wrong.assignments = {{0, 0, 1, 3}, {1, 1, 1, 2}};
  CHECK(audit_schedule(instance, wrong).has("WrongLength"));
}

TEST_CASE("audit_schedule: throughput machine range, no coverage requirement") {
  Instance tp;
  tp.model = Model::Throughput;
  tp.machines = 1;
  tp.jobs = {job(0, 0, 1), job(1, 0, 1)};
  Schedule s;
  s.assignments = {{0, 0, 0, 1}};
  CHECK(audit_schedule(tp, s).ok());
  s.assignments = {{0, 1, 0, 1}};
  CHECK(audit_schedule(tp, s).has("MachineOutOfRange"));
}

TEST_CASE("machine profile") {
  MachineProfile p;
  CHECK(p.at(3) == 0);
  p.set(2, 5);
  CHECK(p.horizon() == 3);
  CHECK(p.at(2) == 5);
  CHECK(p.at(0) == 0);
  CHECK(p.at(-1) == 0);
  CHECK(p.max() == 5);
  CHECK(MachineProfile::constant(2, 4).at(3) == 2);
  CHECK(MachineProfile::constant(2, 4).at(4) == 0);
}

TEST_CASE("rational helpers") {
  CHECK(floor_int(Rational(-3, 2)) == -2);
  CHECK(ceil_int(Rational(-3, 2)) == -1);
  CHECK(floor_int(Rational(7, 2)) == 3);
  CHECK(ceil_int(Rational(7, 2)) == 4);
  CHECK(ceil_int(Rational(4)) == 4);
  CHECK(is_dyadic(Rational(3, 8)));
  CHECK_FALSE(is_dyadic(Rational(1, 3)));
  CHECK(ceil_div(7, 2) == 4);
  CHECK(ceil_div(0, 3) == 0);
  CHECK(Rational(1) == 1);
  CHECK(2 != Rational(3, 2));
}

TEST_CASE("format and parse rationals") {
  CHECK(format_rational(Rational(5)) == "5");
  CHECK(format_rational(Rational(5, 4)) == "1.25");
  CHECK(format_rational(Rational(-1, 8)) == "-0.125");
  CHECK(format_rational(Rational(1, 3)) == "1/3");
  CHECK(format_rational(Rational(3, 10)) == "0.3");
  CHECK(parse_rational("1.25") == Rational(5, 4));
  CHECK(parse_rational("-0.125") == Rational(-1, 8));
  CHECK(parse_rational("2/6") == Rational(1, 3));
  CHECK(parse_rational(".5") == Rational(1, 2));
  CHECK_THROWS(parse_rational("1/0"));
  CHECK_THROWS(parse_rational("abc"));
  CHECK_THROWS(parse_rational(""));
}

TEST_CASE("read_instance: parse errors carry field and line") {
  try {
    read_instance("{\"model\": \"unit-min\",\n \"jobs\": [ }");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  try {
    read_instance(R"({"model": "unit-min"})");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.field() == "jobs");
    CHECK(e.line() == 0);
  }
  try {
    read_instance(R"({"model": "unit-min", "jobs": [{"id": 0, "r": "x", "d": 1}]})");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.field() == "jobs[0].r");
  }
  CHECK_THROWS_AS(read_instance(R"({"model": "nope", "jobs": []})"), ParseError);
  CHECK_THROWS_AS(read_instance(R"({"model": "unit-min", "jobs": [{"id": 0, "r": 1, "d": 1}]})"),
                  InvalidInstance);
}

TEST_CASE("read_instance: defaults and decimal strings") {
  const auto instance =
      read_instance(R"({"model": "equal-deadline", "jobs": [{"id": 3, "r": "0.5", "d": 7, "p": "0.25"}]})");
  REQUIRE(instance.jobs.size() == 1);
  CHECK(instance.jobs[0].release == Rational(1, 2));
  CHECK(instance.jobs[0].length == Rational(1, 4));
  CHECK(instance.jobs[0].weight == 1);
}

TEST_CASE("instance round trip on 1000 random instances") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 1000; ++i) {
    Instance instance;
    switch (i % 3) {
      case 0: instance = gen::random_unit(static_cast<std::int64_t>(rng() % 40), 1 + static_cast<std::int64_t>(rng() % 30), rng()); break;
      case 1: instance = gen::equal_deadline(1 + static_cast<int>(rng() % 6), static_cast<std::int64_t>(rng() % 40), rng()); break;
      default: instance = gen::throughput(static_cast<std::int64_t>(rng() % 40), 1 + static_cast<std::int64_t>(rng() % 20), 1 + static_cast<std::int64_t>(rng() % 4), 0, 9, rng()); break;
    }
    REQUIRE(validate_instance(instance).ok());
    const auto text = write_instance(instance);
    const auto back = read_instance(text);
    CHECK(back == instance);
    CHECK(write_instance(back) == text);
  }
}

TEST_CASE("factor: exact and Euler ceilings") {
  CHECK(Factor::euler().ceil_mul(1) == 3);
  CHECK(Factor::euler().ceil_mul(4) == 11);
  CHECK(Factor::euler().ceil_mul(16) == 44);
  CHECK(Factor::euler().ceil_mul(0) == 0);
  CHECK(Factor::euler().ceil_mul(1'000'000'000'000LL) == 2'718'281'828'460LL);
  CHECK(Factor::exact(Rational(5, 2)).ceil_mul(3) == 8);
  CHECK(Factor::exact(Rational(2)).ceil_mul(7) == 14);
  CHECK_THROWS_AS(Factor::infinity().ceil_mul(1), ContractViolation);
  CHECK_FALSE(Factor::infinity().reached_by(1'000'000, 1));
  CHECK(Factor::euler().reached_by(3, 1));
  CHECK_FALSE(Factor::euler().reached_by(2, 1));
  CHECK(Factor::parse("e") == Factor::euler());
  CHECK(Factor::parse("inf") == Factor::infinity());
  CHECK(Factor::parse("2.5") == Factor::exact(Rational(5, 2)));
  CHECK(Factor::parse("5/2").to_string() == "2.5");
  CHECK_THROWS(Factor::parse("-1"));
}

TEST_CASE("factor: Euler ceiling agrees with a long double reference off the knife edge") {
  for (std::int64_t x = 1; x < 200000; x += 7) {
    const long double product = 2.718281828459045235360287471352662498L * static_cast<long double>(x);
    CHECK(Factor::euler().ceil_mul(x) == static_cast<std::int64_t>(std::ceil(product)));
  }
}
