#include <doctest.h>

#include <cmath>
#include <random>

#include "sched/adversary.hpp"
#include "sched/certificate.hpp"
#include "sched/generators.hpp"
#include "sched/online_min.hpp"
#include "sched/oracle.hpp"

using namespace sched;
using namespace sched::certificate;

namespace {

CertificateReport check_run(const std::vector<UnitJob>& jobs, const MachineProfile& profile,
                            std::span<const std::int64_t> off, Step target, int grid = 200) {
  const auto edf = oracle::edf_simulate(jobs, profile);
  CheckInputs inputs;
  inputs.profile = &profile;
  inputs.off_series = off;
  inputs.slot_of = &edf.trace.slot_of;
  inputs.grid = grid;
  return check_certificate(build_certificate(jobs, target), inputs);
}

}  // namespace

TEST_CASE("certificate: density and completion") {
  const std::vector<UnitJob> jobs = {{0, 0, 4, Rational(1)}};
  const auto cert = build_certificate(jobs, 4);
  REQUIRE(cert.supports().size() == 1);
  const auto& s = cert.supports()[0];
  CHECK(cert.density(s, 2.0) == doctest::Approx(0.5));
  CHECK(s.end == doctest::Approx(4.0 - 4.0 / std::exp(1.0)));
  CHECK(cert.completion_integral(s) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cert.cumulative(s, 0.0) == 0.0);
  CHECK(cert.cumulative(s, 10.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cert.density(s, 3.5) == 0.0);
}

TEST_CASE("certificate: completion integral by quadrature") {
  const std::vector<UnitJob> jobs = {{0, 3, 9, Rational(1)}};
  const auto cert = build_certificate(jobs, 9);
  const auto& s = cert.supports()[0];
  const int steps = 200000;
  const double a = 3.0;
  const double h = (s.end - a) / steps;
  double sum = 0.0;
  for (int i = 0; i < steps; ++i) sum += cert.density(s, a + (i + 0.5) * h) * h;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("certificate: degenerate jobs and bad targets") {
  const std::vector<UnitJob> jobs = {{0, 4, 5, Rational(1)}, {1, 0, 4, Rational(1)}};
  const auto cert = build_certificate(jobs, 4);
  CHECK(cert.supports().size() == 1);
  CHECK(cert.excluded().empty());
  // A job with release at the target cannot have deadline <= target; jobs
  // beyond the target are simply outside J*.
  CHECK_THROWS_AS(build_certificate(jobs, 0), ContractViolation);
}

TEST_CASE("certificate: closed form agrees with direct summation") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 100; ++i) {
    const auto instance = gen::random_unit(1 + static_cast<std::int64_t>(rng() % 50), 2 + static_cast<Step>(rng() % 20), rng());
    const auto jobs = to_unit_jobs(instance.jobs);
    for (const auto target : {*instance.horizon, *instance.horizon / 2 + 1}) {
      const auto cert = build_certificate(jobs, target);
      for (int k = 0; k < 200; ++k) {
        const double x = static_cast<double>(target) * k / 200.0;
        CHECK(cert.total_density(x) == doctest::Approx(cert.total_density_closed(x)).epsilon(1e-9));
        CHECK(cert.r_star(x) == doctest::Approx(static_cast<double>(target) - std::exp(1.0) * (static_cast<double>(target) - x)));
      }
    }
  }
}

TEST_CASE("certificate: e-EDF runs pass every check for every target") {
  std::mt19937_64 rng(32);
  for (int i = 0; i < 40; ++i) {
    const auto instance = gen::random_unit(1 + static_cast<std::int64_t>(rng() % 60), 2 + static_cast<Step>(rng() % 20), rng());
    const auto jobs = to_unit_jobs(instance.jobs);
    const auto t = online::run_alpha_edf(instance, Factor::euler());
    const auto edf = oracle::edf_simulate(jobs, t.profile);
    CheckInputs inputs;
    inputs.profile = &t.profile;
    inputs.off_series = t.off_series;
    inputs.slot_of = &edf.trace.slot_of;
    inputs.grid = 100;
    for (const auto& report : check_all_targets(jobs, inputs)) {
      CHECK(report.ok());
      CHECK(report.worst_dominance_margin >= -1e-9);
    }
  }
}

TEST_CASE("certificate: single job packs under e everywhere") {
  const std::vector<UnitJob> jobs = {{0, 0, 5, Rational(1)}};
  const auto t = online::run_alpha_edf(jobs, Factor::euler());
  const auto report = check_run(jobs, t.profile, t.off_series, 5);
  CHECK(report.ok());
  CHECK(report.worst_packing_margin > 0.0);
}

TEST_CASE("certificate: a 2*OFF profile on an adversary instance violates packing") {
  const auto jobs = adversary::adversary_jobs(20, 400);
  const auto off = oracle::off_prefix_series(jobs);
  MachineProfile low;
  for (Step t = 0; t < 20; ++t) low.set(t, Factor::exact(Rational(2)).ceil_mul(off[static_cast<std::size_t>(t)]));
  const auto report = check_run(jobs, low, {}, 20);
  CHECK_FALSE(report.ok());
  bool packing = false;
  for (const auto& f : report.failures) packing = packing || f.check == "packing";
  CHECK(packing);
  CHECK(report.worst_packing_margin < 0.0);
}
