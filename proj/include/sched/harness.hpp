#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sched/generators.hpp"

namespace sched::harness {

enum Exit : int { kOk = 0, kAuditFailed = 1, kUsage = 2 };

/// Bad flags, missing files, model/algorithm mismatch. Maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Format { Json, Csv };

struct GenConfig {
  gen::Params params;
  bool seeded = false;
  std::optional<std::filesystem::path> out;
};

struct RunConfig {
  std::filesystem::path instance;
  std::string algo;  // alpha-edf | e-edf | equal-deadline | perturbed-greedy | greedy | edf-throughput
  std::optional<std::string> alpha;
  std::optional<std::uint64_t> seed;
  std::int64_t trials = 0;
  std::optional<std::filesystem::path> out;
  Format format = Format::Csv;
};

struct GameConfig {
  std::string algo;
  std::optional<std::string> alpha;
  std::int64_t n = 0;
  std::optional<std::int64_t> big_n;  // defaults to n^2
  std::optional<std::string> rho;     // e for the exact game, inf for aggregate
  bool aggregate = false;
  std::optional<std::filesystem::path> out;
  Format format = Format::Csv;
};

struct VerifyConfig {
  std::string what;  // certificate | lemma3 | equal-deadline | reduction
  std::optional<std::filesystem::path> instance;
  std::optional<std::filesystem::path> transcript;
  std::int64_t n = 0;
  std::optional<std::int64_t> big_n;
  Step from = 0;
  std::optional<Step> to;
  std::int64_t count = 200;
  std::optional<std::uint64_t> seed;
  int grid = 1000;
  std::optional<std::filesystem::path> out;
};

struct BenchConfig {
  std::filesystem::path sweep;
  std::optional<std::filesystem::path> out;
  std::optional<double> budget_seconds;
  int jobs = 1;
};

int gen(const GenConfig& config, std::ostream& out);
int run(const RunConfig& config, std::ostream& out);
int game(const GameConfig& config, std::ostream& out);
int verify(const VerifyConfig& config, std::ostream& out);
int bench(const BenchConfig& config, std::ostream& out);

/// Parses argv, dispatches, and maps exceptions to exit codes.
int main(int argc, char** argv);

// Reports.

/// One row of a fixed, versioned CSV schema.
struct Row {
  std::vector<std::pair<std::string, std::string>> cells;
  Row& add(std::string key, std::string value);
  Row& add(std::string key, std::int64_t value);
  Row& add(std::string key, double value);
};

/// "# <schema> v<version>: col,col,..." followed by the column line.
void write_csv_header(std::ostream& out, const std::string& schema, int version,
                      const std::vector<std::string>& columns);
/// Cells are emitted in column order; unknown keys throw, missing ones stay blank.
void write_csv_row(std::ostream& out, const std::vector<std::string>& columns, const Row& row);
nlohmann::ordered_json row_to_json(const Row& row);
/// Shortest round-trip text for a double.
std::string format_double(double x);

extern const std::vector<std::string> kRunColumns;
extern const std::vector<std::string> kGameColumns;
extern const std::vector<std::string> kBenchColumns;
extern const std::vector<std::string> kRatioColumns;

}  // namespace sched::harness
