#include "sched/instance_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace sched {

namespace {

std::string describe(const ValidationReport& report) {
  std::string out = "invalid instance:";
  for (const auto& v : report.violations) {
    out += " " + v.rule;
    if (v.job) out += "(job " + std::to_string(*v.job) + ")";
  }
  return out;
}

int line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + byte, '\n'));
}

std::int64_t parse_int(std::string_view text) {
  std::int64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw std::invalid_argument("not an integer: '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

InvalidInstance::InvalidInstance(ValidationReport report)
    : std::runtime_error(describe(report)), report_(std::move(report)) {}

std::string format_rational(const Rational& x) {
  const auto num = x.numerator();
  const auto den = x.denominator();
  if (den == 1) return std::to_string(num);

  auto rest = den;
  int twos = 0;
  int fives = 0;
  while (rest % 2 == 0) { rest /= 2; ++twos; }
  while (rest % 5 == 0) { rest /= 5; ++fives; }
  if (rest != 1) return std::to_string(num) + "/" + std::to_string(den);

  // Scale to a power-of-ten denominator: num/den = num * f / 10^digits.
  const int digits = std::max(twos, fives);
  __int128 scaled = num;
  for (int i = twos; i < digits; ++i) scaled *= 2;
  for (int i = fives; i < digits; ++i) scaled *= 5;
  const bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::string body;
  while (scaled > 0) {
    body.insert(body.begin(), static_cast<char>('0' + static_cast<int>(scaled % 10)));
    scaled /= 10;
  }
  if (static_cast<int>(body.size()) <= digits) {
    body.insert(0, static_cast<std::size_t>(digits + 1) - body.size(), '0');
  }
  body.insert(body.size() - static_cast<std::size_t>(digits), ".");
  return negative ? "-" + body : body;
}

Rational parse_rational(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty rational");
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const auto den = parse_int(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    return Rational(parse_int(text.substr(0, slash)), den);
  }
  const auto dot = text.find('.');
  if (dot == std::string_view::npos) return Rational(parse_int(text));

  const bool negative = text.front() == '-';
  const auto whole_text = text.substr(negative ? 1 : 0, dot - (negative ? 1 : 0));
  const auto frac_text = text.substr(dot + 1);
  if (frac_text.size() > 17 || frac_text.empty()) {
    throw std::invalid_argument("unsupported decimal: '" + std::string(text) + "'");
  }
  std::int64_t scale = 1;
  for (std::size_t i = 0; i < frac_text.size(); ++i) scale *= 10;
  const auto whole = whole_text.empty() ? 0 : parse_int(whole_text);
  const auto frac = parse_int(frac_text);
  if (whole < 0 || frac < 0) throw std::invalid_argument("malformed decimal");
  Rational value = Rational(whole) + Rational(frac, scale);
  return negative ? -value : value;
}

nlohmann::json rational_to_json(const Rational& x) {
  if (is_integral(x)) return x.numerator();
  return format_rational(x);
}

Rational rational_from_json(const nlohmann::json& value, const std::string& field) {
  try {
    if (value.is_number_integer()) return Rational(value.get<std::int64_t>());
    if (value.is_number_float()) {
      char buffer[64];
      const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value.get<double>());
      if (ec != std::errc()) throw std::invalid_argument("unprintable float");
      return parse_rational(std::string_view(buffer, static_cast<std::size_t>(ptr - buffer)));
    }
    if (value.is_string()) return parse_rational(value.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ParseError("field '" + field + "': " + e.what(), field, 0);
  } catch (const boost::bad_rational& e) {
    throw ParseError("field '" + field + "': " + e.what(), field, 0);
  }
  throw ParseError("field '" + field + "' must be a number or decimal string", field, 0);
}

Instance read_instance(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), "", line_of(text, e.byte));
  }
  if (!doc.is_object()) throw ParseError("instance must be a JSON object", "", 1);

  auto require = [&](const char* field) -> const nlohmann::json& {
    if (!doc.contains(field)) {
      throw ParseError(std::string("missing field '") + field + "'", field, 0);
    }
    return doc.at(field);
  };
  auto optional_int = [&](const char* field) -> std::optional<std::int64_t> {
    if (!doc.contains(field) || doc.at(field).is_null()) return std::nullopt;
    if (!doc.at(field).is_number_integer()) {
      throw ParseError(std::string("field '") + field + "' must be an integer", field, 0);
    }
    return doc.at(field).get<std::int64_t>();
  };

  Instance instance;
  const auto& model = require("model");
  if (!model.is_string() || !parse_model(model.get<std::string>())) {
    throw ParseError("field 'model' must be one of unit-min, equal-deadline, throughput",
                     "model", 0);
  }
  instance.model = *parse_model(model.get<std::string>());
  instance.machines = optional_int("k");
  instance.horizon = optional_int("horizon");
  instance.common_deadline = optional_int("d");

  const auto& jobs = require("jobs");
  if (!jobs.is_array()) throw ParseError("field 'jobs' must be an array", "jobs", 0);
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& entry = jobs[i];
    const auto prefix = "jobs[" + std::to_string(i) + "].";
    if (!entry.is_object()) throw ParseError(prefix + " must be an object", prefix, 0);
    auto field = [&](const char* name, std::optional<Rational> fallback) {
      if (!entry.contains(name)) {
        if (fallback) return *fallback;
        throw ParseError("missing field '" + prefix + name + "'", prefix + name, 0);
      }
      return rational_from_json(entry.at(name), prefix + name);
    };
    Job job;
    if (!entry.contains("id") || !entry.at("id").is_number_integer()) {
      throw ParseError("field '" + prefix + "id' must be an integer", prefix + "id", 0);
    }
    job.id = entry.at("id").get<JobId>();
    job.release = field("r", std::nullopt);
    job.deadline = field("d", std::nullopt);
    job.length = field("p", Rational(1));
    job.weight = field("w", Rational(1));
    instance.jobs.push_back(job);
  }

  if (auto report = validate_instance(instance); !report.ok()) {
    throw InvalidInstance(std::move(report));
  }
  return instance;
}

std::string write_instance(const Instance& instance) {
  nlohmann::ordered_json doc;
  doc["model"] = std::string(to_string(instance.model));
  if (instance.machines) doc["k"] = *instance.machines;
  if (instance.horizon) doc["horizon"] = *instance.horizon;
  if (instance.common_deadline) doc["d"] = *instance.common_deadline;
  auto jobs = nlohmann::ordered_json::array();
  for (const auto& job : instance.jobs) {
    nlohmann::ordered_json entry;
    entry["id"] = job.id;
    entry["r"] = rational_to_json(job.release);
    entry["d"] = rational_to_json(job.deadline);
    entry["p"] = rational_to_json(job.length);
    entry["w"] = rational_to_json(job.weight);
    jobs.push_back(std::move(entry));
  }
  doc["jobs"] = std::move(jobs);
  return doc.dump(1) + "\n";
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return read_instance(buffer.str());
}

void save_instance(const Instance& instance, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << write_instance(instance);
}

nlohmann::json schedule_to_json(const Schedule& schedule) {
  auto assignments = nlohmann::json::array();
  for (const auto& a : schedule.assignments) {
    assignments.push_back({{"job", a.job},
                           {"machine", a.machine},
                           {"start", rational_to_json(a.start)},
                           {"end", rational_to_json(a.end)}});
  }
  return {{"assignments", std::move(assignments)}, {"misses", schedule.misses}};
}

}  // namespace sched
