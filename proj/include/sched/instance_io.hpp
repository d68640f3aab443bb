#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "sched/core.hpp"

namespace sched {

/// Malformed instance document. `line` is 0 when the failure is structural
/// (missing or mistyped field) rather than lexical.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, std::string field, int line)
      : std::runtime_error(std::move(message)), field_(std::move(field)), line_(line) {}

  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

class InvalidInstance : public std::runtime_error {
 public:
  explicit InvalidInstance(ValidationReport report);
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

/// Integers print as integers, terminating rationals as decimals ("1.25"),
/// anything else as "num/den".
std::string format_rational(const Rational& x);
Rational parse_rational(std::string_view text);

nlohmann::json rational_to_json(const Rational& x);
Rational rational_from_json(const nlohmann::json& value, const std::string& field);

Instance read_instance(std::string_view text);
std::string write_instance(const Instance& instance);

Instance load_instance(const std::filesystem::path& path);
void save_instance(const Instance& instance, const std::filesystem::path& path);

nlohmann::json schedule_to_json(const Schedule& schedule);

}  // namespace sched
