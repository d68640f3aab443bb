#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <spdlog/spdlog.h>

#include "sched/adversary.hpp"
#include "sched/certificate.hpp"
#include "sched/equal_deadline.hpp"
#include "sched/harness.hpp"
#include "sched/instance_io.hpp"
#include "sched/online_min.hpp"
#include "sched/oracle.hpp"
#include "sched/throughput.hpp"

namespace sched::harness {

namespace {

constexpr double kRatioFloor = 1.0 - 1.0 / std::numbers::e - 0.02;

Instance load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw UsageError("no such file: " + path.string());
  try {
    return load_instance(path);
  } catch (const ParseError& e) {
    throw UsageError(path.string() + ": " + e.what());
  } catch (const InvalidInstance& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
}

nlohmann::json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("no such file: " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw UsageError("cannot write " + path.string());
  file << text;
}

Factor factor_arg(const std::optional<std::string>& text, const char* flag) {
  if (!text) throw UsageError(std::string(flag) + " is required");
  try {
    return Factor::parse(*text);
  } catch (const std::exception& e) {
    throw UsageError(std::string("bad ") + flag + ": " + e.what());
  }
}

void require_model(const Instance& instance, Model model, const std::string& algo) {
  if (instance.model != model) {
    throw UsageError("algorithm " + algo + " needs a " + std::string(to_string(model)) +
                     " instance, got " + std::string(to_string(instance.model)));
  }
}

std::int64_t square(std::int64_t n) {
  if (n > 3'000'000'000LL) throw UsageError("n too large for N = n^2");
  return n * n;
}

void emit(std::ostream& out, Format format, const std::string& schema,
          const std::vector<std::string>& columns, const Row& row) {
  if (format == Format::Csv) {
    write_csv_header(out, schema, 1, columns);
    write_csv_row(out, columns, row);
  } else {
    out << row_to_json(row).dump(1) << '\n';
  }
}

double ratio_of(double a, double b) { return b > 0 ? a / b : (a > 0 ? INFINITY : 1.0); }

}  // namespace

int gen(const GenConfig& config, std::ostream& out) {
  const auto kind = config.params.kind;
  const bool randomized = kind == gen::Kind::RandomUnit || kind == gen::Kind::EqualDeadline ||
                          kind == gen::Kind::Throughput;
  if (randomized && !config.seeded) {
    throw UsageError("--seed is required for " + std::string(gen::to_string(kind)));
  }
  Instance instance;
  try {
    instance = gen::generate(config.params);
  } catch (const ContractViolation& e) {
    throw UsageError(e.what());
  }
  const auto text = write_instance(instance);
  if (config.out) {
    write_file(*config.out, text);
  } else {
    out << text;
  }
  spdlog::info("gen {}: {} jobs", gen::to_string(kind), instance.jobs.size());
  return kOk;
}

int run(const RunConfig& config, std::ostream& out) {
  const auto instance = load(config.instance);
  const auto& algo = config.algo;
  Row row;
  row.add("instance", config.instance.filename().string())
      .add("algo", algo)
      .add("model", std::string(to_string(instance.model)))
      .add("jobs", static_cast<std::int64_t>(instance.jobs.size()));
  bool ok = true;
  std::string artifact;

  if (algo == "alpha-edf" || algo == "e-edf") {
    require_model(instance, Model::UnitMin, algo);
    const auto alpha = algo == "e-edf" ? Factor::euler() : factor_arg(config.alpha, "--alpha");
    const auto transcript = online::run_alpha_edf(instance, alpha);
    const auto audit = audit_schedule(instance, transcript.schedule);
    ok = transcript.feasible() && audit.ok();
    row.add("alpha", alpha.to_string())
        .add("cost", transcript.cost)
        .add("off", transcript.off_final)
        .add("ratio", ratio_of(static_cast<double>(transcript.cost),
                               static_cast<double>(transcript.off_final)))
        .add("misses", static_cast<std::int64_t>(transcript.misses.size()));
    artifact = online::transcript_to_json(transcript).dump(1);
  } else if (algo == "equal-deadline") {
    require_model(instance, Model::EqualDeadline, algo);
    const auto transcript = equal_deadline::run_equal_deadline(instance);
    const auto audit = audit_schedule(instance, transcript.schedule);
    ok = audit.ok() && transcript.bounds_hold() && transcript.audit_failures.empty();
    row.add("cost", transcript.max_concurrent)
        .add("off", transcript.lower_bound)
        .add("ratio", ratio_of(static_cast<double>(transcript.max_concurrent),
                               static_cast<double>(transcript.lower_bound)))
        .add("misses", static_cast<std::int64_t>(transcript.schedule.misses.size()));
    artifact = equal_deadline::transcript_to_json(transcript).dump(1);
  } else if (algo == "perturbed-greedy" || algo == "greedy") {
    require_model(instance, Model::Throughput, algo);
    const auto which = *throughput::parse_algorithm(algo);
    if (which == throughput::Algorithm::PerturbedGreedy && !config.seed) {
      throw UsageError("--seed is required for perturbed-greedy");
    }
    const auto seed = config.seed.value_or(0);
    row.add("seed", std::to_string(seed));
    const auto minstance = throughput::reduce_to_matching(instance);
    if (config.trials > 0) {
      const auto estimate =
          throughput::estimate_ratio_parallel(instance, which, config.trials, seed);
      ok = estimate.ratio >= kRatioFloor;
      row.add("trials", config.trials)
          .add("cost", estimate.mean)
          .add("off", format_rational(estimate.opt))
          .add("ratio", estimate.ratio)
          .add("stderr", estimate.stderr_);
    } else {
      const auto matching = which == throughput::Algorithm::PerturbedGreedy
                                ? throughput::perturbed_greedy(minstance, seed)
                                : throughput::greedy_baseline(minstance);
      const auto schedule = throughput::matching_to_schedule(minstance, matching);
      ok = audit_schedule(instance, schedule).ok();
      const auto opt = oracle::offline_throughput_opt(instance).weight;
      row.add("cost", format_rational(matching.weight))
          .add("off", format_rational(opt))
          .add("ratio", ratio_of(to_double(matching.weight), to_double(opt)));
      nlohmann::json doc = {{"algorithm", algo},
                            {"seed", seed},
                            {"matching", throughput::matching_to_json(matching)},
                            {"schedule", schedule_to_json(schedule)}};
      artifact = doc.dump(1);
    }
  } else if (algo == "edf-throughput") {
    require_model(instance, Model::Throughput, algo);
    Schedule schedule;
    try {
      schedule = throughput::edf_throughput_unweighted(instance);
    } catch (const ContractViolation& e) {
      throw UsageError(e.what());
    }
    const auto weight = throughput::schedule_weight(instance, schedule);
    const auto opt = oracle::offline_throughput_opt(instance).weight;
    ok = audit_schedule(instance, schedule).ok() && weight == opt;
    row.add("cost", format_rational(weight))
        .add("off", format_rational(opt))
        .add("ratio", ratio_of(to_double(weight), to_double(opt)));
    artifact = nlohmann::json{{"algorithm", algo}, {"schedule", schedule_to_json(schedule)}}.dump(1);
  } else {
    throw UsageError("unknown algorithm " + algo);
  }

  row.add("status", ok ? "ok" : "fail");
  if (config.out && !artifact.empty()) write_file(*config.out, artifact + "\n");
  emit(out, config.format, "sched-run", kRunColumns, row);
  if (!ok) spdlog::warn("run {} on {}: audited property failed", algo, config.instance.string());
  return ok ? kOk : kAuditFailed;
}

int game(const GameConfig& config, std::ostream& out) {
  if (config.algo != "alpha-edf" && config.algo != "e-edf") {
    throw UsageError(config.aggregate ? "aggregate mode supports only EDF algorithms"
                                      : "unknown game algorithm " + config.algo);
  }
  if (config.n < 1) throw UsageError("--n must be >= 1");
  const auto alpha =
      config.algo == "e-edf" ? Factor::euler() : factor_arg(config.alpha, "--alpha");
  const auto big_n = config.big_n ? *config.big_n : square(config.n);
  if (big_n < 1) throw UsageError("--big-n must be >= 1");
  const auto rho = config.rho ? factor_arg(config.rho, "--rho")
                              : (config.aggregate ? Factor::infinity() : Factor::euler());

  Row row;
  row.add("algo", config.algo)
      .add("alpha", alpha.to_string())
      .add("n", config.n)
      .add("big_n", big_n)
      .add("rho", rho.to_string())
      .add("mode", config.aggregate ? "aggregate" : "exact");

  if (config.aggregate) {
    const auto result = adversary::aggregate_game(alpha, config.n, big_n, rho);
    const auto online_max =
        result.online.empty() ? 0 : *std::max_element(result.online.begin(), result.online.end());
    const auto off = result.off.empty() ? 0 : result.off.back();
    row.add("stopped_at", result.stopped_at ? std::to_string(*result.stopped_at) : "")
        .add("online_max", online_max)
        .add("off", off)
        .add("ratio", ratio_of(static_cast<double>(online_max), static_cast<double>(off)))
        .add("released", std::to_string(static_cast<long long>(result.total_released)))
        .add("missed", result.missed() ? "true" : "false");
    if (config.out) {
      std::ofstream file(*config.out);
      if (!file) throw UsageError("cannot write " + config.out->string());
      adversary::write_aggregate_csv(result, file);
    }
  } else {
    online::AlphaEdf algorithm(alpha);
    const auto result = adversary::play_game(algorithm, config.n, big_n, rho);
    row.add("stopped_at", result.stopped_at ? std::to_string(*result.stopped_at) : "")
        .add("online_max", result.online_max)
        .add("off", result.off_final)
        .add("ratio", result.ratio)
        .add("released", result.total_released)
        .add("missed", result.missed() ? "true" : "false");
    if (config.out) write_file(*config.out, adversary::game_to_json(result).dump(1) + "\n");
  }
  emit(out, config.format, "sched-game", kGameColumns, row);
  return kOk;
}

namespace {

nlohmann::json verify_certificate(const VerifyConfig& config, bool& pass) {
  if (!config.instance) throw UsageError("verify certificate needs --instance");
  const auto instance = load(*config.instance);
  require_model(instance, Model::UnitMin, "certificate");
  online::Transcript transcript;
  if (config.transcript) {
    try {
      transcript = online::transcript_from_json(load_json(*config.transcript));
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(config.transcript->string() + ": " + e.what());
    }
  } else {
    transcript = online::run_alpha_edf(instance, Factor::euler());
  }
  const auto jobs = to_unit_jobs(instance.jobs);
  const auto edf = oracle::edf_simulate(jobs, transcript.profile);
  certificate::CheckInputs inputs;
  inputs.profile = &transcript.profile;
  inputs.off_series = transcript.off_series;
  inputs.slot_of = &edf.trace.slot_of;
  inputs.grid = config.grid;
  const auto reports = certificate::check_all_targets(jobs, inputs);

  pass = edf.trace.feasible();
  auto targets = nlohmann::json::array();
  for (const auto& r : reports) {
    pass = pass && r.ok();
    auto failures = nlohmann::json::array();
    for (const auto& f : r.failures) {
      failures.push_back({{"check", f.check}, {"t", f.t}, {"margin", f.margin}});
      if (f.job) failures.back()["job"] = *f.job;
    }
    targets.push_back({{"d_star", r.target},
                       {"pass", r.ok()},
                       {"completion_checks", r.completion_checks},
                       {"packing_points", r.packing_points},
                       {"dominance_points", r.dominance_points},
                       {"worst_packing_margin", r.worst_packing_margin},
                       {"worst_dominance_margin", r.worst_dominance_margin},
                       {"failure_count", r.failure_count},
                       {"failures", std::move(failures)}});
  }
  return {{"alpha", transcript.alpha.to_string()},
          {"edf_feasible", edf.trace.feasible()},
          {"targets", std::move(targets)}};
}

nlohmann::json verify_lemma3(const VerifyConfig& config, bool& pass) {
  if (config.n < 1) throw UsageError("verify lemma3 needs --n >= 1");
  const auto big_n = config.big_n ? *config.big_n : square(config.n);
  const auto to = config.to.value_or(config.n - 1);
  if (config.from < 0 || to < config.from || to >= config.n) {
    throw UsageError("verify lemma3 needs 0 <= from <= to < n");
  }
  const auto points = adversary::lemma3_envelope(config.n, big_n, config.from, to);
  auto rows = nlohmann::json::array();
  auto violations = nlohmann::json::array();
  pass = true;
  for (const auto& p : points) {
    rows.push_back({{"t_star", p.t_star}, {"off", p.off}, {"bound", p.bound}, {"holds", p.holds()}});
    if (!p.holds()) {
      pass = false;
      violations.push_back({{"t_star", p.t_star}, {"margin", p.bound - p.off}});
    }
  }
  return {{"n", config.n},
          {"big_n", big_n},
          {"from", config.from},
          {"to", to},
          {"violations", std::move(violations)},
          {"points", std::move(rows)}};
}

nlohmann::json verify_equal_deadline(const VerifyConfig& config, bool& pass) {
  if (!config.instance) throw UsageError("verify equal-deadline needs --instance");
  const auto instance = load(*config.instance);
  require_model(instance, Model::EqualDeadline, "equal-deadline");
  const auto transcript = equal_deadline::run_equal_deadline(instance);
  const auto audit = audit_schedule(instance, transcript.schedule);
  pass = audit.ok() && transcript.bounds_hold() && transcript.audit_failures.empty();
  auto doc = equal_deadline::transcript_to_json(transcript);
  auto violations = nlohmann::json::array();
  for (const auto& v : audit.violations) violations.push_back({{"rule", v.rule}, {"detail", v.detail}});
  doc["schedule_violations"] = std::move(violations);
  doc.erase("jobs");
  return doc;
}

// Round trips schedule -> matching -> schedule and matching -> schedule ->
// matching; returns a description of the first mismatch, if any.
std::optional<std::string> reduction_round_trip(const Instance& instance, std::uint64_t seed) {
  const auto minstance = throughput::reduce_to_matching(instance);
  for (std::size_t u = 0; u < minstance.offline().size(); ++u) {
    std::optional<Step> first;
    for (std::size_t v = 0; v < minstance.online().size() && !first; ++v) {
      if (minstance.adjacent(u, v)) first = minstance.online()[v].t;
    }
    if (first != minstance.offline()[u].reveal) return "reveal step of u" + std::to_string(u);
  }

  const auto opt = oracle::offline_throughput_opt(instance);
  const auto matching = throughput::schedule_to_matching(minstance, opt.schedule);
  const auto back = throughput::matching_to_schedule(minstance, matching);
  if (back != opt.schedule) return std::string("schedule round trip changed the schedule");
  if (matching.weight != opt.weight) return std::string("matching weight differs from schedule weight");

  const auto greedy = throughput::perturbed_greedy(minstance, seed);
  const auto schedule = throughput::matching_to_schedule(minstance, greedy);
  const auto again = throughput::schedule_to_matching(minstance, schedule);
  if (again.pairs != greedy.pairs || again.weight != greedy.weight) {
    return std::string("matching round trip changed the matching");
  }
  if (throughput::schedule_weight(instance, schedule) != greedy.weight) {
    return std::string("schedule weight differs from matching weight");
  }
  return std::nullopt;
}

nlohmann::json verify_reduction(const VerifyConfig& config, bool& pass) {
  std::vector<std::pair<std::string, Instance>> instances;
  const auto seed = config.seed.value_or(0);
  if (config.instance) {
    auto instance = load(*config.instance);
    require_model(instance, Model::Throughput, "reduction");
    instances.emplace_back(config.instance->filename().string(), std::move(instance));
  } else {
    if (!config.seed) throw UsageError("verify reduction needs --instance or --seed");
    for (std::int64_t i = 0; i < config.count; ++i) {
      const auto s = throughput::derive_seed(seed, static_cast<std::uint64_t>(i));
      std::mt19937_64 rng(s);
      auto pick = [&](std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
      };
      const auto jobs = pick(0, 30);
      const auto horizon = pick(1, 15);
      const auto k = pick(1, 4);
      instances.emplace_back("random-" + std::to_string(i),
                             gen::throughput(jobs, horizon, k, 1, 10, rng()));
    }
  }
  pass = true;
  auto failures = nlohmann::json::array();
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto problem = reduction_round_trip(instances[i].second, throughput::derive_seed(seed, i));
    if (problem) {
      pass = false;
      failures.push_back({{"instance", instances[i].first}, {"problem", *problem}});
    }
  }
  return {{"instances", instances.size()}, {"failures", std::move(failures)}};
}

}  // namespace

int verify(const VerifyConfig& config, std::ostream& out) {
  bool pass = false;
  nlohmann::json doc;
  if (config.what == "certificate") {
    doc = verify_certificate(config, pass);
  } else if (config.what == "lemma3") {
    doc = verify_lemma3(config, pass);
  } else if (config.what == "equal-deadline") {
    doc = verify_equal_deadline(config, pass);
  } else if (config.what == "reduction") {
    doc = verify_reduction(config, pass);
  } else {
    throw UsageError("unknown check " + config.what);
  }
  doc["check"] = config.what;
  doc["pass"] = pass;
  const auto text = doc.dump(1) + "\n";
  if (config.out) {
    write_file(*config.out, text);
    out << "{\"check\": \"" << config.what << "\", \"pass\": " << (pass ? "true" : "false") << "}\n";
  } else {
    out << text;
  }
  return pass ? kOk : kAuditFailed;
}

}  // namespace sched::harness
