#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sched/core.hpp"

namespace sched::certificate {

/// Fractional schedule for one target deadline d*: every job with d_j <= d*
/// runs at density 1 / (d* - x) on [r_j, d* - (d* - r_j) / e].
class FractionalCertificate {
 public:
  struct Support {
    JobId id;
    Step release;
    double end;
  };

  FractionalCertificate(Step target, std::vector<Support> supports, std::vector<JobId> excluded);

  Step target() const { return target_; }
  std::span<const Support> supports() const { return supports_; }
  std::span<const JobId> excluded() const { return excluded_; }

  double density(const Support& job, double x) const;
  /// Sum of f_j(x) over every job, term by term.
  double total_density(double x) const;
  /// |Lambda(x)| / (d* - x) with Lambda(x) = {j : r*(x) <= r_j <= x}.
  double total_density_closed(double x) const;
  double r_star(double x) const;
  std::int64_t lambda_size(double x) const;

  /// Closed form of the integral of f_j over its support; 1 up to rounding.
  double completion_integral(const Support& job) const;
  /// Integral of f_j over [0, t].
  double cumulative(const Support& job, double t) const;

 private:
  Step target_;
  std::vector<Support> supports_;
  std::vector<Step> releases_;  // sorted
  std::vector<JobId> excluded_;
};

/// J* = {j : d_j <= d*}. Jobs with r_j >= d* have an empty support and are
/// listed as excluded.
FractionalCertificate build_certificate(std::span<const UnitJob> jobs, Step target);

struct CertificateFailure {
  std::string check;  // completion | agreement | packing | packing-off | dominance
  double t = 0.0;
  std::optional<JobId> job;
  double margin = 0.0;  // bound - value; negative on failure
};

struct CertificateReport {
  Step target = 0;
  std::int64_t completion_checks = 0;
  std::int64_t packing_points = 0;
  std::int64_t dominance_points = 0;
  double worst_packing_margin = 0.0;
  double worst_dominance_margin = 0.0;
  std::int64_t failure_count = 0;
  std::vector<CertificateFailure> failures;  // first few, for diagnostics

  bool ok() const { return failure_count == 0; }
};

struct CheckInputs {
  const MachineProfile* profile = nullptr;        // m(t); packing vs the machine count
  std::span<const std::int64_t> off_series;       // OFF(t); packing vs e * OFF, if non-empty
  const std::unordered_map<JobId, Step>* slot_of = nullptr;  // EDF slots, for dominance
  int grid = 1000;                                // points per unit interval
  double tolerance = 1e-9;
};

CertificateReport check_certificate(const FractionalCertificate& cert, const CheckInputs& inputs);

/// Every distinct deadline as d*; one report per target.
std::vector<CertificateReport> check_all_targets(std::span<const UnitJob> jobs,
                                                 const CheckInputs& inputs);

}  // namespace sched::certificate
