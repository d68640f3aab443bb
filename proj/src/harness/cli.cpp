#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "sched/harness.hpp"
#include "sched/instance_io.hpp"

namespace sched::harness {

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("sched");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("SCHED_LOG")) {
    spdlog::set_level(spdlog::level::from_str(level));
  }
}

const std::map<std::string, Format> kFormats = {{"json", Format::Json}, {"csv", Format::Csv}};

}  // namespace

int main(int argc, char** argv) {
  if (!spdlog::get("sched")) setup_logging();

  CLI::App app{"Online scheduling laboratory"};
  app.require_subcommand(1);

  GenConfig gen_config;
  std::string kind = "random-unit";
  std::optional<std::uint64_t> gen_seed;
  std::optional<std::string> gen_out;
  auto* gen_cmd = app.add_subcommand("gen", "Generate an instance file");
  gen_cmd->add_option("--kind", kind, "adversary|random-unit|equal-deadline|throughput|upper-triangular")
      ->required();
  gen_cmd->add_option("--n", gen_config.params.n, "Adversary steps, or job count");
  gen_cmd->add_option("--big-n", gen_config.params.big_n, "Adversary N (default n^2)");
  gen_cmd->add_option("--horizon", gen_config.params.horizon);
  gen_cmd->add_option("--kappa", gen_config.params.kappa);
  gen_cmd->add_option("--k", gen_config.params.k, "Machines");
  gen_cmd->add_option("--w-min", gen_config.params.w_min);
  gen_cmd->add_option("--w-max", gen_config.params.w_max);
  gen_cmd->add_option("--levels", gen_config.params.levels);
  gen_cmd->add_option("--seed", gen_seed);
  gen_cmd->add_option("--out", gen_out);

  RunConfig run_config;
  std::string run_instance;
  std::optional<std::string> run_out;
  std::string run_format = "csv";
  auto* run_cmd = app.add_subcommand("run", "Run an algorithm on an instance");
  run_cmd->add_option("instance", run_instance)->required();
  run_cmd->add_option("--algo", run_config.algo,
                      "alpha-edf|e-edf|equal-deadline|perturbed-greedy|greedy|edf-throughput")
      ->required();
  run_cmd->add_option("--alpha", run_config.alpha);
  run_cmd->add_option("--seed", run_config.seed);
  run_cmd->add_option("--trials", run_config.trials);
  run_cmd->add_option("--out", run_out, "Transcript path");
  run_cmd->add_option("--format", run_format)->check(CLI::IsMember({"json", "csv"}));

  GameConfig game_config;
  std::optional<std::string> game_out;
  std::string game_format = "csv";
  auto* game_cmd = app.add_subcommand("game", "Play the adversary game");
  game_cmd->add_option("--algo", game_config.algo)->required();
  game_cmd->add_option("--alpha", game_config.alpha);
  game_cmd->add_option("--n", game_config.n)->required();
  game_cmd->add_option("--big-n", game_config.big_n);
  game_cmd->add_option("--rho", game_config.rho);
  game_cmd->add_flag("--aggregate", game_config.aggregate, "Counter simulation (EDF only)");
  game_cmd->add_option("--out", game_out);
  game_cmd->add_option("--format", game_format)->check(CLI::IsMember({"json", "csv"}));

  VerifyConfig verify_config;
  std::optional<std::string> verify_instance;
  std::optional<std::string> verify_transcript;
  std::optional<std::string> verify_out;
  std::optional<std::string> verify_range;
  auto* verify_cmd = app.add_subcommand("verify", "Check a property and report pass/fail");
  verify_cmd->add_option("what", verify_config.what, "certificate|lemma3|equal-deadline|reduction")
      ->required();
  verify_cmd->add_option("--instance", verify_instance);
  verify_cmd->add_option("--transcript", verify_transcript);
  verify_cmd->add_option("--n", verify_config.n);
  verify_cmd->add_option("--big-n", verify_config.big_n);
  verify_cmd->add_option("--range", verify_range, "from:to for lemma3");
  verify_cmd->add_option("--count", verify_config.count);
  verify_cmd->add_option("--seed", verify_config.seed);
  verify_cmd->add_option("--grid", verify_config.grid);
  verify_cmd->add_option("--out", verify_out);

  BenchConfig bench_config;
  std::string sweep;
  std::optional<std::string> bench_out;
  auto* bench_cmd = app.add_subcommand("bench", "Run a sweep and emit a CSV table");
  bench_cmd->add_option("sweep", sweep)->required();
  bench_cmd->add_option("--out", bench_out);
  bench_cmd->add_option("--budget", bench_config.budget_seconds, "Seconds per cell");
  bench_cmd->add_option("--jobs", bench_config.jobs, "Cells run in parallel");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen_cmd) {
      const auto parsed = gen::parse_kind(kind);
      if (!parsed) throw UsageError("unknown kind " + kind);
      gen_config.params.kind = *parsed;
      if (*parsed == gen::Kind::Adversary && gen_config.params.big_n == 0) {
        gen_config.params.big_n = gen_config.params.n * gen_config.params.n;
      }
      gen_config.seeded = gen_seed.has_value();
      gen_config.params.seed = gen_seed.value_or(0);
      if (gen_out) gen_config.out = *gen_out;
      return gen(gen_config, std::cout);
    }
    if (*run_cmd) {
      run_config.instance = run_instance;
      if (run_out) run_config.out = *run_out;
      run_config.format = kFormats.at(run_format);
      return run(run_config, std::cout);
    }
    if (*game_cmd) {
      if (game_out) game_config.out = *game_out;
      game_config.format = kFormats.at(game_format);
      return game(game_config, std::cout);
    }
    if (*verify_cmd) {
      if (verify_instance) verify_config.instance = *verify_instance;
      if (verify_transcript) verify_config.transcript = *verify_transcript;
      if (verify_out) verify_config.out = *verify_out;
      if (verify_range) {
        const auto colon = verify_range->find(':');
        try {
          if (colon == std::string::npos) throw std::invalid_argument("missing ':'");
          verify_config.from = std::stoll(verify_range->substr(0, colon));
          verify_config.to = std::stoll(verify_range->substr(colon + 1));
        } catch (const std::exception&) {
          throw UsageError("--range must look like from:to");
        }
      }
      return verify(verify_config, std::cout);
    }
    if (*bench_cmd) {
      bench_config.sweep = sweep;
      if (bench_out) bench_config.out = *bench_out;
      return bench(bench_config, std::cout);
    }
  } catch (const UsageError& e) {
    spdlog::error("{}", e.what());
    return kUsage;
  } catch (const ContractViolation& e) {
    spdlog::error("{}", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kAuditFailed;
  }
  return kUsage;
}

}  // namespace sched::harness
