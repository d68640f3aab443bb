#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "sched/core.hpp"

namespace sched {

/// A competitive multiplier: the EDF over-provisioning factor alpha or the
/// adversary's stop threshold rho. Either an exact rational, Euler's number,
/// or +infinity (only meaningful as a threshold that is never reached).
class Factor {
 public:
  enum class Kind { Rational, Euler, Infinity };

  static Factor euler() { return Factor(Kind::Euler, Rational(0)); }
  static Factor infinity() { return Factor(Kind::Infinity, Rational(0)); }
  static Factor exact(Rational value);

  /// Accepts "e", "inf", integers, decimals ("2.5") and fractions ("5/2").
  static Factor parse(std::string_view text);

  /// ceil(factor * x) for x >= 0, computed without binary64 rounding.
  /// Throws ContractViolation if factor * x lies within 1e-12 of an integer
  /// while factor is irrational, or if the factor is infinite.
  std::int64_t ceil_mul(std::int64_t x) const;

  /// online >= factor * off.
  bool reached_by(std::int64_t online, std::int64_t off) const;

  Kind kind() const { return kind_; }
  double value() const;
  std::string to_string() const;

  bool operator==(const Factor&) const = default;

 private:
  Factor(Kind kind, Rational value) : kind_(kind), value_(value) {}

  Kind kind_;
  Rational value_;
};

}  // namespace sched
