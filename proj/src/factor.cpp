#include "sched/factor.hpp"

#include <cmath>
#include <limits>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "sched/instance_io.hpp"

namespace sched {

namespace {

using Wide = boost::multiprecision::cpp_bin_float_50;

constexpr long double kEulerLong = 2.718281828459045235360287471352662498L;
constexpr double kKnifeEdge = 1e-12;

std::int64_t ceil_euler_wide(std::int64_t x) {
  const Wide product = boost::math::constants::e<Wide>() * Wide(x);
  const Wide up = ceil(product);
  const Wide down = floor(product);
  if (up - product < kKnifeEdge || product - down < kKnifeEdge) {
    throw ContractViolation("e * " + std::to_string(x) + " is within 1e-12 of an integer");
  }
  return up.convert_to<std::int64_t>();
}

}  // namespace

Factor Factor::exact(Rational value) {
  if (value < 0) throw ContractViolation("factor must be non-negative");
  return Factor(Kind::Rational, value);
}

Factor Factor::parse(std::string_view text) {
  if (text == "e") return euler();
  if (text == "inf" || text == "infinity") return infinity();
  return exact(parse_rational(text));
}

std::int64_t Factor::ceil_mul(std::int64_t x) const {
  if (x < 0) throw ContractViolation("ceil_mul expects x >= 0");
  switch (kind_) {
    case Kind::Rational: {
      const __int128 num = static_cast<__int128>(value_.numerator()) * x;
      const __int128 den = value_.denominator();
      return static_cast<std::int64_t>((num + den - 1) / den);
    }
    case Kind::Euler: {
      if (x == 0) return 0;
      // Fast path: long double has a 64-bit mantissa, so the product is exact
      // to well under 1e-6 for x below 2^40; fall back to 50 digits otherwise
      // or when the product is close to an integer.
      const long double product = kEulerLong * static_cast<long double>(x);
      const long double up = std::ceil(product);
      const long double slack = product * 4 * std::numeric_limits<long double>::epsilon();
      if (up - product > slack + kKnifeEdge && product - (up - 1) > slack + kKnifeEdge) {
        return static_cast<std::int64_t>(up);
      }
      return ceil_euler_wide(x);
    }
    case Kind::Infinity:
      break;
  }
  throw ContractViolation("cannot multiply by an infinite factor");
}

bool Factor::reached_by(std::int64_t online, std::int64_t off) const {
  if (kind_ == Kind::Infinity) return false;
  return online >= ceil_mul(off);
}

double Factor::value() const {
  switch (kind_) {
    case Kind::Rational: return to_double(value_);
    case Kind::Euler: return std::exp(1.0);
    case Kind::Infinity: return std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

std::string Factor::to_string() const {
  switch (kind_) {
    case Kind::Rational: return format_rational(value_);
    case Kind::Euler: return "e";
    case Kind::Infinity: return "inf";
  }
  return "?";
}

}  // namespace sched
