#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>

#include <spdlog/spdlog.h>

#include "sched/adversary.hpp"
#include "sched/equal_deadline.hpp"
#include "sched/harness.hpp"
#include "sched/instance_io.hpp"
#include "sched/online_min.hpp"
#include "sched/oracle.hpp"
#include "sched/throughput.hpp"

namespace sched::harness {

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kDefaultBudget = 300.0;
constexpr double kRatioFloor = 1.0 - 1.0 / std::numbers::e - 0.02;
const std::vector<std::string> kAlgos = {"aggregate",        "alpha-edf", "e-edf", "equal-deadline",
                                         "perturbed-greedy", "greedy",    "edf-throughput"};

// Array-valued fields expand into the cartesian product of cells.
void expand(const nlohmann::json& cell, std::vector<nlohmann::json>& cells) {
  for (auto it = cell.begin(); it != cell.end(); ++it) {
    if (!it->is_array()) continue;
    if (it->empty()) return;
    for (const auto& value : *it) {
      auto copy = cell;
      copy[it.key()] = value;
      expand(copy, cells);
    }
    return;
  }
  cells.push_back(cell);
}

std::string text_of(const nlohmann::json& value) {
  return value.is_string() ? value.get<std::string>() : value.dump();
}

std::string params_of(const nlohmann::json& cell) {
  std::string params;
  for (auto it = cell.begin(); it != cell.end(); ++it) {
    if (it.key() == "algo" || it.key() == "generator") continue;
    if (!params.empty()) params += ';';
    params += it.key() + '=' + text_of(it.value());
  }
  return params;
}

std::int64_t int_field(const nlohmann::json& cell, const char* key, std::int64_t fallback) {
  return cell.contains(key) ? cell.at(key).get<std::int64_t>() : fallback;
}

gen::Params generator_params(const nlohmann::json& cell) {
  const auto kind_text = cell.value("generator", std::string());
  const auto kind = gen::parse_kind(kind_text);
  if (!kind) throw UsageError("unknown generator '" + kind_text + "'");
  gen::Params p;
  p.kind = *kind;
  p.n = int_field(cell, "n", 0);
  p.big_n = int_field(cell, "big_n", p.n * p.n);
  p.horizon = int_field(cell, "horizon", 0);
  p.kappa = static_cast<int>(int_field(cell, "kappa", 0));
  p.k = int_field(cell, "k", 1);
  p.w_min = int_field(cell, "w_min", 1);
  p.w_max = int_field(cell, "w_max", 1);
  p.levels = int_field(cell, "levels", 0);
  p.seed = static_cast<std::uint64_t>(int_field(cell, "seed", 0));
  return p;
}

Factor alpha_of(const nlohmann::json& cell, const std::string& algo) {
  if (algo == "e-edf") return Factor::euler();
  if (!cell.contains("alpha")) throw UsageError("cell needs alpha");
  return Factor::parse(text_of(cell.at("alpha")));
}

double ratio_of(double a, double b) { return b > 0 ? a / b : (a > 0 ? INFINITY : 1.0); }

// Evaluates one expanded cell; "status" is filled here, timing by the caller.
Row run_cell(const nlohmann::json& cell) {
  const auto algo = cell.value("algo", std::string());
  Row row;
  row.add("algo", algo).add("generator", cell.value("generator", std::string()));
  for (const char* key : {"n", "big_n", "k", "trials", "seed"}) {
    if (cell.contains(key)) row.add(key, text_of(cell.at(key)));
  }
  bool ok = true;

  if (algo == "aggregate") {
    const auto alpha = alpha_of(cell, "alpha-edf");
    const auto n = int_field(cell, "n", 0);
    if (n < 1) throw UsageError("aggregate cell needs n >= 1");
    const auto big_n = int_field(cell, "big_n", n * n);
    const auto rho = cell.contains("rho") ? Factor::parse(text_of(cell.at("rho"))) : Factor::infinity();
    const auto result = adversary::aggregate_game(alpha, n, big_n, rho);
    const auto online = *std::max_element(result.online.begin(), result.online.end());
    const auto off = result.off.back();
    if (!cell.contains("big_n")) row.add("big_n", big_n);
    row.add("alpha", alpha.to_string())
        .add("cost", online)
        .add("off", off)
        .add("ratio", ratio_of(static_cast<double>(online), static_cast<double>(off)))
        .add("missed", result.missed() ? "true" : "false");
  } else {
    const auto instance = gen::generate(generator_params(cell));
    if (algo == "alpha-edf" || algo == "e-edf") {
      const auto alpha = alpha_of(cell, algo);
      const auto t = online::run_alpha_edf(instance, alpha);
      ok = t.feasible() || alpha.value() < std::numbers::e;
      row.add("alpha", alpha.to_string())
          .add("cost", t.cost)
          .add("off", t.off_final)
          .add("ratio", ratio_of(static_cast<double>(t.cost), static_cast<double>(t.off_final)))
          .add("missed", t.feasible() ? "false" : "true");
    } else if (algo == "equal-deadline") {
      const auto t = equal_deadline::run_equal_deadline(instance);
      ok = t.bounds_hold() && t.audit_failures.empty();
      row.add("cost", t.max_concurrent)
          .add("off", t.lower_bound)
          .add("ratio", ratio_of(static_cast<double>(t.max_concurrent),
                                 static_cast<double>(t.lower_bound)))
          .add("missed", "false");
    } else if (algo == "perturbed-greedy" || algo == "greedy") {
      const auto trials = int_field(cell, "trials", 1);
      const auto seed = static_cast<std::uint64_t>(int_field(cell, "seed", 0));
      const auto e = throughput::estimate_ratio(instance, *throughput::parse_algorithm(algo),
                                                trials, seed);
      ok = algo == "greedy" || e.ratio >= kRatioFloor;
      row.add("cost", e.mean)
          .add("off", format_rational(e.opt))
          .add("ratio", e.ratio)
          .add("stderr", e.stderr_);
    } else if (algo == "edf-throughput") {
      const auto schedule = throughput::edf_throughput_unweighted(instance);
      const auto weight = throughput::schedule_weight(instance, schedule);
      const auto opt = oracle::offline_throughput_opt(instance).weight;
      ok = weight == opt;
      row.add("cost", format_rational(weight))
          .add("off", format_rational(opt))
          .add("ratio", ratio_of(to_double(weight), to_double(opt)));
    } else {
      throw UsageError("unknown algo '" + algo + "'");
    }
  }
  row.add("status", ok ? "ok" : "fail");
  return row;
}

struct Running {
  pid_t pid = -1;
  int fd = -1;
  std::size_t index = 0;
  Clock::time_point start;
  std::string buffer;
};

Row decode(const std::string& text) {
  Row row;
  for (const auto& pair : nlohmann::json::parse(text)) {
    row.add(pair.at(0).get<std::string>(), pair.at(1).get<std::string>());
  }
  return row;
}

std::string encode(const Row& row) {
  auto doc = nlohmann::json::array();
  for (const auto& [key, value] : row.cells) doc.push_back({key, value});
  return doc.dump();
}

// Runs the cell in a child process so an over-budget cell can be killed.
Running launch(const nlohmann::json& cell, std::size_t index) {
  int fds[2];
  if (pipe(fds) != 0) throw std::runtime_error("pipe failed");
  const pid_t pid = fork();
  if (pid < 0) throw std::runtime_error("fork failed");
  if (pid == 0) {
    close(fds[0]);
    std::string payload;
    try {
      payload = encode(run_cell(cell));
    } catch (const std::exception& e) {
      spdlog::error("bench cell {}: {}", index, e.what());
      payload = encode(Row().add("status", "error"));
    }
    std::size_t written = 0;
    while (written < payload.size()) {
      const auto w = write(fds[1], payload.data() + written, payload.size() - written);
      if (w <= 0) break;
      written += static_cast<std::size_t>(w);
    }
    close(fds[1]);
    _exit(0);
  }
  close(fds[1]);
  return {pid, fds[0], index, Clock::now(), {}};
}

}  // namespace

int bench(const BenchConfig& config, std::ostream& out) {
  std::ifstream in(config.sweep);
  if (!in) throw UsageError("no such file: " + config.sweep.string());
  nlohmann::json sweep;
  try {
    sweep = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(config.sweep.string() + ": " + e.what());
  }
  if (config.jobs < 1) throw UsageError("--jobs must be >= 1");
  const double budget =
      config.budget_seconds.value_or(sweep.value("budget_seconds", kDefaultBudget));
  if (!(budget > 0)) throw UsageError("budget must be positive");

  std::vector<nlohmann::json> cells;
  for (const auto& cell : sweep.value("cells", nlohmann::json::array())) {
    if (!cell.is_object() || !cell.contains("algo")) throw UsageError("every cell needs an algo");
    expand(cell, cells);
  }
  for (const auto& cell : cells) {
    const auto algo = text_of(cell.at("algo"));
    if (std::find(kAlgos.begin(), kAlgos.end(), algo) == kAlgos.end()) {
      throw UsageError("unknown algo '" + algo + "'");
    }
    if (algo != "aggregate" && !gen::parse_kind(cell.value("generator", std::string()))) {
      throw UsageError("cell with algo " + algo + " needs a generator");
    }
  }

  std::ofstream file;
  if (config.out) {
    file.open(*config.out);
    if (!file) throw UsageError("cannot write " + config.out->string());
  }
  std::ostream& sink = config.out ? static_cast<std::ostream&>(file) : out;
  write_csv_header(sink, "sched-bench", 1, kBenchColumns);
  sink.flush();
  out.flush();

  std::vector<std::optional<Row>> rows(cells.size());
  std::vector<Running> running;
  std::size_t next = 0;
  bool failed = false;
  auto finish = [&](Running& job, const std::string& status) {
    close(job.fd);
    if (status == "timeout") kill(job.pid, SIGKILL);
    int wstatus = 0;
    waitpid(job.pid, &wstatus, 0);
    const double seconds = std::chrono::duration<double>(Clock::now() - job.start).count();
    Row row;
    if (status.empty() && !job.buffer.empty()) {
      row = decode(job.buffer);
    } else {
      row.add("status", status.empty() ? "error" : status);
    }
    row.add("cell", static_cast<std::int64_t>(job.index))
        .add("params", params_of(cells[job.index]))
        .add("seconds", seconds);
    if (status == "timeout") {
      row.add("algo", cells[job.index].value("algo", std::string()));
      spdlog::warn("bench cell {} exceeded its {} s budget", job.index, budget);
    }
    rows[job.index] = std::move(row);
  };

  while (next < cells.size() || !running.empty()) {
    while (next < cells.size() && running.size() < static_cast<std::size_t>(config.jobs)) {
      spdlog::debug("bench cell {}: {}", next, cells[next].dump());
      running.push_back(launch(cells[next], next));
      ++next;
    }
    std::vector<pollfd> fds;
    double wait = budget;
    for (const auto& job : running) {
      fds.push_back({job.fd, POLLIN, 0});
      const double used = std::chrono::duration<double>(Clock::now() - job.start).count();
      wait = std::min(wait, budget - used);
    }
    poll(fds.data(), fds.size(), static_cast<int>(std::max(0.0, std::ceil(wait * 1000.0))));
    for (std::size_t i = running.size(); i-- > 0;) {
      auto& job = running[i];
      bool done = false;
      if (fds[i].revents & (POLLIN | POLLHUP | POLLERR)) {
        char chunk[4096];
        const auto got = read(job.fd, chunk, sizeof chunk);
        if (got > 0) {
          job.buffer.append(chunk, static_cast<std::size_t>(got));
        } else {
          finish(job, "");
          done = true;
        }
      }
      if (!done && std::chrono::duration<double>(Clock::now() - job.start).count() >= budget) {
        finish(job, "timeout");
        done = true;
      }
      if (done) running.erase(running.begin() + static_cast<std::ptrdiff_t>(i));
    }
  }

  for (const auto& row : rows) {
    const auto status = std::find_if(row->cells.begin(), row->cells.end(),
                                     [](const auto& c) { return c.first == "status"; });
    if (status == row->cells.end() || status->second != "ok") failed = true;
    write_csv_row(sink, kBenchColumns, *row);
  }
  sink.flush();
  return failed ? kAuditFailed : kOk;
}

}  // namespace sched::harness
