#include <algorithm>
#include <charconv>
#include <cmath>

#include "sched/harness.hpp"

namespace sched::harness {

const std::vector<std::string> kRunColumns = {
    "instance", "algo", "model", "alpha", "seed", "trials", "jobs",
    "cost",     "off",  "ratio", "misses", "stderr", "status"};

const std::vector<std::string> kGameColumns = {
    "algo",   "alpha",    "n",     "big_n",    "rho",   "mode",
    "stopped_at", "online_max", "off", "ratio", "released", "missed"};

const std::vector<std::string> kBenchColumns = {
    "cell", "generator", "params", "algo",  "alpha",  "n",      "big_n",   "k",      "trials",
    "seed", "status",    "cost",   "off",   "ratio",  "stderr", "missed",  "seconds"};

const std::vector<std::string> kRatioColumns = {"instance", "algo",  "k",      "trials", "mean",
                                                "opt",      "ratio", "stderr", "seed"};

Row& Row::add(std::string key, std::string value) {
  cells.emplace_back(std::move(key), std::move(value));
  return *this;
}

Row& Row::add(std::string key, std::int64_t value) { return add(std::move(key), std::to_string(value)); }

Row& Row::add(std::string key, double value) { return add(std::move(key), format_double(value)); }

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, x);
  return std::string(buffer, result.ptr);
}

namespace {

std::string escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string quoted = "\"";
  for (const char c : cell) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

void join(std::ostream& out, const std::vector<std::string>& items) {
  for (std::size_t i = 0; i < items.size(); ++i) out << (i ? "," : "") << escape(items[i]);
  out << '\n';
}

}  // namespace

void write_csv_header(std::ostream& out, const std::string& schema, int version,
                      const std::vector<std::string>& columns) {
  out << "# " << schema << " v" << version << ": ";
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  join(out, columns);
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& columns, const Row& row) {
  std::vector<std::string> values(columns.size());
  for (const auto& [key, value] : row.cells) {
    const auto it = std::find(columns.begin(), columns.end(), key);
    if (it == columns.end()) throw std::logic_error("unknown CSV column " + key);
    values[static_cast<std::size_t>(it - columns.begin())] = value;
  }
  join(out, values);
}

nlohmann::ordered_json row_to_json(const Row& row) {
  auto doc = nlohmann::ordered_json::object();
  for (const auto& [key, value] : row.cells) {
    auto parsed = nlohmann::ordered_json::parse(value, nullptr, false);
    doc[key] = parsed.is_number() || parsed.is_boolean() ? std::move(parsed) : nlohmann::ordered_json(value);
  }
  return doc;
}

}  // namespace sched::harness
