#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>

// Boost 1.74's mixed rational/integer operator== recurses forever under C++20
// reversed-candidate lookup; exact non-template overloads take precedence.
namespace boost {
#define SCHED_RATIONAL_EQ(Int)                                                                   \
  inline bool operator==(const rational<long>& a, Int b) { return a == rational<long>(b); }      \
  inline bool operator==(Int a, const rational<long>& b) { return rational<long>(a) == b; }      \
  inline bool operator!=(const rational<long>& a, Int b) { return !(a == rational<long>(b)); }   \
  inline bool operator!=(Int a, const rational<long>& b) { return !(rational<long>(a) == b); }
SCHED_RATIONAL_EQ(int)
SCHED_RATIONAL_EQ(long)
#undef SCHED_RATIONAL_EQ
}  // namespace boost

namespace sched {

using Rational = boost::rational<std::int64_t>;
using JobId = std::int64_t;
using Step = std::int64_t;
using MachineId = std::int64_t;

/// Thrown when a caller breaks a documented precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class Model { UnitMin, EqualDeadline, Throughput };

std::string_view to_string(Model model);
std::optional<Model> parse_model(std::string_view text);

struct Job {
  JobId id = 0;
  Rational release{0};
  Rational deadline{1};
  Rational length{1};
  Rational weight{1};

  bool operator==(const Job&) const = default;
};

/// Integral view of a unit-length job. Slot t occupies [t, t+1).
struct UnitJob {
  JobId id = 0;
  Step release = 0;
  Step deadline = 1;
  Rational weight{1};

  bool operator==(const UnitJob&) const = default;
};

struct Instance {
  Model model = Model::UnitMin;
  std::vector<Job> jobs;
  std::optional<std::int64_t> machines;         // k, throughput only
  std::optional<Step> horizon;                  // max deadline, unit models
  std::optional<std::int64_t> common_deadline;  // d = 2^kappa - 1, equal-deadline

  bool operator==(const Instance&) const = default;
};

struct Violation {
  std::optional<JobId> job;
  std::string rule;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(std::string_view rule) const;
};

ValidationReport validate_instance(const Instance& instance);

/// Sorts jobs by (release, id), the canonical instance order.
void normalize(Instance& instance);

bool feasible_slot(const UnitJob& job, Step t);
bool feasible_slot(const Job& job, Step t);

UnitJob to_unit(const Job& job);
Job to_job(const UnitJob& job);
std::vector<UnitJob> to_unit_jobs(std::span<const Job> jobs);
std::vector<Job> to_jobs(std::span<const UnitJob> jobs);

struct Assignment {
  JobId job = 0;
  MachineId machine = 0;
  Rational start{0};
  Rational end{1};

  bool operator==(const Assignment&) const = default;
};

struct Schedule {
  std::vector<Assignment> assignments;
  std::vector<JobId> misses;

  bool operator==(const Schedule&) const = default;
};

/// Maximum number of machines simultaneously busy. Throws ContractViolation if
/// two assignments on one machine overlap.
std::int64_t schedule_cost(const Schedule& schedule);

/// Universal schedule auditor: windows, per-machine overlap, job coverage.
ValidationReport audit_schedule(const Instance& instance, const Schedule& schedule);

/// Open-machine counts m(t) for integer steps; steps outside the stored range
/// have m(t) = 0.
class MachineProfile {
 public:
  MachineProfile() = default;
  explicit MachineProfile(std::vector<std::int64_t> counts) : counts_(std::move(counts)) {}

  static MachineProfile constant(std::int64_t m, Step horizon) {
    return MachineProfile(std::vector<std::int64_t>(static_cast<std::size_t>(horizon), m));
  }

  std::int64_t at(Step t) const {
    if (t < 0 || t >= horizon()) return 0;
    return counts_[static_cast<std::size_t>(t)];
  }
  void set(Step t, std::int64_t m);
  Step horizon() const { return static_cast<Step>(counts_.size()); }
  std::span<const std::int64_t> counts() const { return counts_; }
  std::int64_t max() const;

  bool operator==(const MachineProfile&) const = default;

 private:
  std::vector<std::int64_t> counts_;
};

// Rational helpers.
bool is_integral(const Rational& x);
std::int64_t floor_int(const Rational& x);
std::int64_t ceil_int(const Rational& x);
double to_double(const Rational& x);
bool is_dyadic(const Rational& x);

/// ceil(a / b) for b > 0.
constexpr std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  return a >= 0 ? (a + b - 1) / b : -((-a) / b);
}

}  // namespace sched
