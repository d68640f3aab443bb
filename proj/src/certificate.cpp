#include "sched/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace sched::certificate {

namespace {

constexpr double kE = std::numbers::e;
constexpr std::size_t kMaxRecordedFailures = 16;

void fail(CertificateReport& report, std::string check, double t, std::optional<JobId> job,
          double margin) {
  ++report.failure_count;
  if (report.failures.size() < kMaxRecordedFailures) {
    report.failures.push_back({std::move(check), t, job, margin});
  }
}

std::int64_t off_at(std::span<const std::int64_t> series, Step t) {
  if (series.empty()) return 0;
  const auto index = std::min<std::size_t>(static_cast<std::size_t>(t), series.size() - 1);
  return series[index];
}

}  // namespace

FractionalCertificate::FractionalCertificate(Step target, std::vector<Support> supports,
                                             std::vector<JobId> excluded)
    : target_(target), supports_(std::move(supports)), excluded_(std::move(excluded)) {
  releases_.reserve(supports_.size());
  for (const auto& s : supports_) releases_.push_back(s.release);
  std::sort(releases_.begin(), releases_.end());
}

double FractionalCertificate::density(const Support& job, double x) const {
  if (x < static_cast<double>(job.release) || x > job.end) return 0.0;
  return 1.0 / (static_cast<double>(target_) - x);
}

double FractionalCertificate::total_density(double x) const {
  double sum = 0.0;
  for (const auto& s : supports_) sum += density(s, x);
  return sum;
}

double FractionalCertificate::r_star(double x) const {
  return static_cast<double>(target_) - kE * (static_cast<double>(target_) - x);
}

std::int64_t FractionalCertificate::lambda_size(double x) const {
  const double low = r_star(x);
  const auto first = std::lower_bound(releases_.begin(), releases_.end(), low,
                                      [](Step r, double v) { return static_cast<double>(r) < v; });
  const auto last = std::upper_bound(releases_.begin(), releases_.end(), x,
                                     [](double v, Step r) { return v < static_cast<double>(r); });
  return first < last ? static_cast<std::int64_t>(last - first) : 0;
}

double FractionalCertificate::total_density_closed(double x) const {
  return static_cast<double>(lambda_size(x)) / (static_cast<double>(target_) - x);
}

double FractionalCertificate::completion_integral(const Support& job) const {
  const double d = static_cast<double>(target_);
  return std::log((d - static_cast<double>(job.release)) / (d - job.end));
}

double FractionalCertificate::cumulative(const Support& job, double t) const {
  const double r = static_cast<double>(job.release);
  if (t <= r) return 0.0;
  const double d = static_cast<double>(target_);
  return std::log((d - r) / (d - std::min(t, job.end)));
}

FractionalCertificate build_certificate(std::span<const UnitJob> jobs, Step target) {
  if (target < 1) throw ContractViolation("certificate target must be >= 1");
  std::vector<FractionalCertificate::Support> supports;
  std::vector<JobId> excluded;
  const double d = static_cast<double>(target);
  for (const auto& job : jobs) {
    if (job.deadline > target) continue;
    if (job.release >= target) {
      excluded.push_back(job.id);
      continue;
    }
    const double r = static_cast<double>(job.release);
    supports.push_back({job.id, job.release, d - (d - r) / kE});
  }
  return FractionalCertificate(target, std::move(supports), std::move(excluded));
}

CertificateReport check_certificate(const FractionalCertificate& cert, const CheckInputs& inputs) {
  CertificateReport report;
  report.target = cert.target();
  report.worst_packing_margin = std::numeric_limits<double>::infinity();
  report.worst_dominance_margin = std::numeric_limits<double>::infinity();
  const double tol = inputs.tolerance;
  const double d = static_cast<double>(cert.target());
  const auto supports = cert.supports();

  for (const auto& s : supports) {
    ++report.completion_checks;
    const double integral = cert.completion_integral(s);
    if (std::abs(integral - 1.0) > tol) fail(report, "completion", 0.0, s.id, -std::abs(integral - 1.0));
  }

  // Packing: count active supports by sweeping sorted start and end points,
  // and compare with the closed form |Lambda| / (d* - t).
  std::vector<double> starts;
  std::vector<double> ends;
  for (const auto& s : supports) {
    starts.push_back(static_cast<double>(s.release));
    ends.push_back(s.end);
  }
  std::sort(starts.begin(), starts.end());
  std::sort(ends.begin(), ends.end());
  std::size_t started = 0;
  std::size_t ended = 0;
  const int grid = std::max(inputs.grid, 1);
  for (Step step = 0; step < cert.target(); ++step) {
    const std::int64_t machines = inputs.profile ? inputs.profile->at(step) : 0;
    const double off_bound = kE * static_cast<double>(off_at(inputs.off_series, step));
    for (int i = 0; i < grid; ++i) {
      const double t = static_cast<double>(step) + static_cast<double>(i) / grid;
      while (started < starts.size() && starts[started] <= t) ++started;
      while (ended < ends.size() && ends[ended] < t) ++ended;
      const double direct = static_cast<double>(started - ended) / (d - t);
      const double closed = cert.total_density_closed(t);
      ++report.packing_points;
      if (std::abs(direct - closed) > tol) fail(report, "agreement", t, std::nullopt, -std::abs(direct - closed));
      if (inputs.profile) {
        const double margin = static_cast<double>(machines) - direct;
        report.worst_packing_margin = std::min(report.worst_packing_margin, margin);
        if (margin < -tol) fail(report, "packing", t, std::nullopt, margin);
      }
      if (!inputs.off_series.empty()) {
        const double margin = off_bound - direct;
        report.worst_packing_margin = std::min(report.worst_packing_margin, margin);
        if (margin < -tol) fail(report, "packing-off", t, std::nullopt, margin);
      }
    }
  }

  if (inputs.slot_of) {
    // |S(t) n J*| per integer t from the EDF slots.
    std::vector<std::int64_t> done_at(static_cast<std::size_t>(cert.target()) + 2, 0);
    for (const auto& s : supports) {
      const auto it = inputs.slot_of->find(s.id);
      if (it == inputs.slot_of->end()) continue;
      const auto slot = std::min<Step>(it->second + 1, cert.target() + 1);
      ++done_at[static_cast<std::size_t>(slot)];
    }
    std::int64_t scheduled = 0;
    for (Step t = 0; t <= cert.target(); ++t) {
      scheduled += done_at[static_cast<std::size_t>(t)];
      double fractional = 0.0;
      for (const auto& s : supports) fractional += cert.cumulative(s, static_cast<double>(t));
      const double margin = static_cast<double>(scheduled) - fractional;
      ++report.dominance_points;
      report.worst_dominance_margin = std::min(report.worst_dominance_margin, margin);
      if (margin < -tol) fail(report, "dominance", static_cast<double>(t), std::nullopt, margin);
    }
  }
  return report;
}

std::vector<CertificateReport> check_all_targets(std::span<const UnitJob> jobs,
                                                 const CheckInputs& inputs) {
  std::set<Step> targets;
  for (const auto& job : jobs) targets.insert(job.deadline);
  std::vector<CertificateReport> reports;
  for (const auto target : targets) {
    reports.push_back(check_certificate(build_certificate(jobs, target), inputs));
  }
  return reports;
}

}  // namespace sched::certificate
