#include "rqs/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rqs/harness.hpp"
#include "rqs/io.hpp"
#include "rqs/selftest.hpp"

namespace rqs::cli {

namespace fs = std::filesystem;

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> values;
  const auto parse_one = [](const std::string& token) {
    size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument("bad numeric value: " + token);
    return v;
  };
  if (text.find(':') != std::string::npos) {
    std::istringstream in(text);
    std::string start_s, stop_s, step_s;
    if (!std::getline(in, start_s, ':') || !std::getline(in, stop_s, ':') ||
        !std::getline(in, step_s)) {
      throw std::invalid_argument("range must look like start:stop:step, got " + text);
    }
    const double start = parse_one(start_s);
    const double stop = parse_one(stop_s);
    const double step = parse_one(step_s);
    if (!(step > 0.0) || stop < start) {
      throw std::invalid_argument("range must have positive step and stop >= start: " + text);
    }
    const long count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (long i = 0; i < count; ++i) values.push_back(start + step * static_cast<double>(i));
    return values;
  }
  std::istringstream in(text);
  std::string token;
  while (std::getline(in, token, ',')) {
    if (!token.empty()) values.push_back(parse_one(token));
  }
  if (values.empty()) throw std::invalid_argument("empty grid: " + text);
  return values;
}

namespace {

std::vector<long> parse_int_list(const std::string& text) {
  std::vector<long> values;
  for (double v : parse_grid(text)) {
    const long i = static_cast<long>(std::llround(v));
    if (std::abs(v - static_cast<double>(i)) > 1e-9) {
      throw std::invalid_argument("expected integers in list: " + text);
    }
    values.push_back(i);
  }
  return values;
}

std::string default_output_dir() {
  if (const char* env = std::getenv("RQSEARCH_OUTPUT_DIR")) return env;
  return ".";
}

//! Loads --config JSON (if present) and appends "--key value" tokens for
//! every key that does not already appear on the command line, so explicit
//! flags always win over config-file values, which win over defaults.
std::vector<std::string> merge_config_file(std::vector<std::string> args) {
  std::string config_path;
  for (size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--config") config_path = args[i + 1];
  }
  if (config_path.empty()) return args;
  std::ifstream in(config_path);
  if (!in) throw std::invalid_argument("cannot open config file: " + config_path);
  nlohmann::json config;
  try {
    in >> config;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config file is not valid JSON: " + std::string(e.what()));
  }
  if (!config.is_object()) throw std::invalid_argument("config file must hold a JSON object");
  for (const auto& [key, value] : config.items()) {
    const std::string flag = "--" + key;
    bool present = false;
    for (const std::string& arg : args) {
      if (arg == flag) present = true;
    }
    if (present) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_string()) {
      args.push_back(flag);
      args.push_back(value.get<std::string>());
    } else {
      args.push_back(flag);
      args.push_back(value.dump());
    }
  }
  return args;
}

struct CommonFlags {
  std::string out_dir;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string config_path;  // consumed by merge_config_file, kept for echo

  void attach(CLI::App* app) {
    app->add_option("--out", out_dir, "output directory")->default_val(default_output_dir());
    app->add_option("--seed", seed, "master seed")->default_val("1");
    app->add_option("--threads", threads, "worker threads (0 = hardware)")->default_val("0");
    app->add_option("--config", config_path, "JSON config file (flags override it)");
  }
};

using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

void emit(const fs::path& dir, const std::string& command, std::uint64_t seed,
          const ConfigEcho& echo, std::vector<std::pair<std::string, std::string>> files,
          std::ostream& out) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw std::invalid_argument("output path not writable: " + dir.string() + " (" +
                                ec.message() + ")");
  }
  std::vector<EmittedFile> listed;
  for (const auto& [name, content] : files) {
    write_file(dir / name, content);
    listed.push_back({name, content.size(), fnv1a64_hex(content)});
  }
  write_file(dir / "manifest.json", manifest_json(command, seed, echo, listed));
  for (const auto& f : listed) out << "wrote " << (dir / f.name).string() << "\n";
  out << "wrote " << (dir / "manifest.json").string() << "\n";
}

std::vector<SearchInstance> make_instances(const std::string& n_list, const std::string& d_list) {
  if (n_list.empty() == d_list.empty()) {
    throw std::invalid_argument("give exactly one of --n-list or --d-list");
  }
  std::vector<SearchInstance> instances;
  if (!n_list.empty()) {
    for (long n : parse_int_list(n_list)) instances.push_back(SearchInstance::qubits(n));
  } else {
    for (long d : parse_int_list(d_list)) instances.push_back(SearchInstance::qudit(d));
  }
  return instances;
}

// --- subcommand handlers -------------------------------------------------

struct SingleRunArgs {
  CommonFlags common;
  std::string encoding = "qubit";
  long n = 0;
  long d = 0;
  long target = 0;
  std::string schedule = "grover";
  long layers = 0;
  double r = 0.0;
  std::string noise = "none";
  double eps = 0.0;
};

int run_single(const SingleRunArgs& a, std::ostream& out) {
  if (a.encoding != "qubit" && a.encoding != "qudit") {
    throw std::invalid_argument("encoding must be qubit or qudit");
  }
  SearchInstance inst = (a.encoding == "qubit") ? SearchInstance::qubits(a.n, a.target)
                                                : SearchInstance::qudit(a.d, a.target);
  NoiseSpec noise{noise_mechanism_from_string(a.noise), a.eps};
  EngineSettings engine;
  engine.threads = a.common.threads;
  ScheduleSpec schedule;
  if (a.schedule == "grover") {
    schedule = GroverScheduleSpec{a.layers};
  } else if (a.schedule == "greedy") {
    schedule = GreedyScheduleSpec{a.layers, engine.greedy};
  } else {
    throw std::invalid_argument("schedule must be grover or greedy");
  }
  const RunTrace trace = run_schedule(inst, schedule, a.r, noise, a.common.seed, engine);
  out << "final P_success = " << format_real(trace.final_p) << "\n";
  ConfigEcho echo{{"encoding", a.encoding},
                  {"dim", std::to_string(inst.dim())},
                  {"target", std::to_string(a.target)},
                  {"schedule", a.schedule},
                  {"layers", std::to_string(a.layers)},
                  {"r", format_real(a.r)},
                  {"noise", a.noise},
                  {"eps", format_real(a.eps)},
                  {"seed", std::to_string(a.common.seed)},
                  {"out", a.common.out_dir}};
  emit(a.common.out_dir, "single-run", a.common.seed, echo, {{"trace.csv", trace_csv(trace)}},
       out);
  return kExitOk;
}

struct SweepArgs {
  CommonFlags common;
  std::string n_list, d_list;
  long layers = 0;
  std::string schedule = "grover";
  std::string noise = "none";
  std::string eps_grid = "0";
  std::string r_grid = "0";
  int realizations = 20;
};

int run_probability_sweep(const SweepArgs& a, const std::string& command, std::ostream& out) {
  ExperimentConfig cfg;
  cfg.instances = make_instances(a.n_list, a.d_list);
  EngineSettings engine;
  if (a.schedule == "grover") {
    cfg.schedule = GroverScheduleSpec{a.layers};
  } else if (a.schedule == "greedy") {
    cfg.schedule = GreedyScheduleSpec{a.layers, engine.greedy};
  } else {
    throw std::invalid_argument("schedule must be grover or greedy");
  }
  cfg.mode = SweepMode::fixed_layers;
  cfg.mechanism = noise_mechanism_from_string(a.noise);
  cfg.eps_grid = parse_grid(a.eps_grid);
  cfg.r_grid = parse_grid(a.r_grid);
  cfg.realizations = a.realizations;
  cfg.master_seed = a.common.seed;
  cfg.threads = a.common.threads;
  cfg.engine = engine;

  const SweepResult result = run_sweep(cfg);
  if (result.failed_runs > 0) {
    out << result.failed_runs << " runs failed; see sweep.csv\n";
  }
  ConfigEcho echo{{"instances", a.n_list.empty() ? ("D:" + a.d_list) : ("N:" + a.n_list)},
                  {"schedule", a.schedule},
                  {"layers", std::to_string(a.layers)},
                  {"noise", a.noise},
                  {"eps_grid", a.eps_grid},
                  {"r_grid", a.r_grid},
                  {"realizations", std::to_string(a.realizations)},
                  {"failed_runs", std::to_string(result.failed_runs)},
                  {"seed", std::to_string(a.common.seed)},
                  {"out", a.common.out_dir}};
  emit(a.common.out_dir, command, a.common.seed, echo,
       {{"sweep.csv", sweep_csv(result.rows)},
        {"aggregate.csv", aggregate_csv(result.aggregates)}},
       out);
  return kExitOk;
}

struct ScalingArgs {
  CommonFlags common;
  std::string n_list, d_list;
  std::string noise = "none";
  std::string eps_grid = "0";
  std::string r_grid = "0";
  double delta = 0.5;
  long layer_cap = 0;
};

int run_scaling(const ScalingArgs& a, std::ostream& out) {
  ExperimentConfig cfg;
  cfg.instances = make_instances(a.n_list, a.d_list);
  cfg.mode = SweepMode::computation_time;
  cfg.mechanism = noise_mechanism_from_string(a.noise);
  cfg.eps_grid = parse_grid(a.eps_grid);
  cfg.r_grid = parse_grid(a.r_grid);
  cfg.delta = a.delta;
  cfg.layer_cap = a.layer_cap;
  cfg.realizations = 1;
  cfg.master_seed = a.common.seed;
  cfg.threads = a.common.threads;

  const SweepResult result = run_sweep(cfg);
  if (result.failed_runs > 0) {
    out << result.failed_runs << " runs failed; see scaling.csv\n";
  }
  ConfigEcho echo{{"instances", a.n_list.empty() ? ("D:" + a.d_list) : ("N:" + a.n_list)},
                  {"noise", a.noise},
                  {"eps_grid", a.eps_grid},
                  {"r_grid", a.r_grid},
                  {"delta", format_real(a.delta)},
                  {"layer_cap", std::to_string(a.layer_cap)},
                  {"failed_runs", std::to_string(result.failed_runs)},
                  {"seed", std::to_string(a.common.seed)},
                  {"out", a.common.out_dir}};
  emit(a.common.out_dir, "scaling", a.common.seed, echo,
       {{"scaling.csv", scaling_csv(result.scaling_rows)}}, out);
  return kExitOk;
}

int run_selftest(int trials, int krylov_trials, std::uint64_t seed, std::ostream& out) {
  SelftestOptions opts;
  opts.trials = trials;
  opts.krylov_trials = krylov_trials;
  opts.seed = seed;
  bool all_passed = true;
  for (const CheckResult& check : run_invariant_suite(opts)) {
    out << (check.passed ? "[PASS] " : "[FAIL] ") << check.name << ": " << check.detail << "\n";
    all_passed = all_passed && check.passed;
  }
  return all_passed ? kExitOk : kExitRuntime;
}

}  // namespace

int execute(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"reinforced quantum search simulator"};
  app.require_subcommand(1);

  SingleRunArgs single;
  CLI::App* single_cmd = app.add_subcommand("single-run", "one run, per-layer trace CSV");
  single.common.attach(single_cmd);
  single_cmd->add_option("--encoding", single.encoding, "qubit | qudit")->required();
  single_cmd->add_option("--n", single.n, "qubit count");
  single_cmd->add_option("--d", single.d, "qudit levels");
  single_cmd->add_option("--target", single.target, "target basis index")->default_val("0");
  single_cmd->add_option("--schedule", single.schedule, "grover | greedy")->default_val("grover");
  single_cmd->add_option("--layers", single.layers, "layer count")->required();
  single_cmd->add_option("--r", single.r, "reinforcement strength")->default_val("0");
  single_cmd->add_option("--noise", single.noise, "noise mechanism")->default_val("none");
  single_cmd->add_option("--eps", single.eps, "noise strength")->default_val("0");

  SweepArgs sweep_noise;
  CLI::App* sweep_noise_cmd =
      app.add_subcommand("sweep-noise", "P_success vs noise strength over realizations");
  sweep_noise.common.attach(sweep_noise_cmd);
  sweep_noise_cmd->add_option("--n-list", sweep_noise.n_list, "qubit counts, e.g. 8,10,12");
  sweep_noise_cmd->add_option("--d-list", sweep_noise.d_list, "qudit dimensions");
  sweep_noise_cmd->add_option("--layers", sweep_noise.layers, "layer count")->required();
  sweep_noise_cmd->add_option("--schedule", sweep_noise.schedule, "grover | greedy")
      ->default_val("grover");
  sweep_noise_cmd->add_option("--noise", sweep_noise.noise, "noise mechanism")->required();
  sweep_noise_cmd->add_option("--eps-grid", sweep_noise.eps_grid, "eps values or start:stop:step")
      ->required();
  sweep_noise_cmd->add_option("--r-list", sweep_noise.r_grid, "r values")->default_val("0");
  sweep_noise_cmd->add_option("--realizations", sweep_noise.realizations, "noise realizations")
      ->default_val("20");

  SweepArgs sweep_r;
  CLI::App* sweep_r_cmd = app.add_subcommand("sweep-r", "P_success vs reinforcement strength");
  sweep_r.common.attach(sweep_r_cmd);
  sweep_r.realizations = 1;
  sweep_r_cmd->add_option("--n-list", sweep_r.n_list, "qubit counts");
  sweep_r_cmd->add_option("--d-list", sweep_r.d_list, "qudit dimensions");
  sweep_r_cmd->add_option("--layers", sweep_r.layers, "layer count")->required();
  sweep_r_cmd->add_option("--schedule", sweep_r.schedule, "grover | greedy")
      ->default_val("grover");
  sweep_r_cmd->add_option("--noise", sweep_r.noise, "noise mechanism")->default_val("none");
  sweep_r_cmd->add_option("--eps", sweep_r.eps_grid, "noise strength")->default_val("0");
  sweep_r_cmd->add_option("--r-grid", sweep_r.r_grid, "r values or start:stop:step")->required();
  sweep_r_cmd->add_option("--realizations", sweep_r.realizations, "noise realizations")
      ->default_val("1");

  ScalingArgs scaling;
  CLI::App* scaling_cmd =
      app.add_subcommand("scaling", "computation time L(delta) vs system size (greedy)");
  scaling.common.attach(scaling_cmd);
  scaling_cmd->add_option("--n-list", scaling.n_list, "qubit counts");
  scaling_cmd->add_option("--d-list", scaling.d_list, "qudit dimensions");
  scaling_cmd->add_option("--noise", scaling.noise, "noise mechanism")->default_val("none");
  scaling_cmd->add_option("--eps-grid", scaling.eps_grid, "eps values")->default_val("0");
  scaling_cmd->add_option("--r-list", scaling.r_grid, "r values")->default_val("0");
  scaling_cmd->add_option("--delta", scaling.delta, "success threshold 1-delta")
      ->default_val("0.5");
  scaling_cmd->add_option("--layer-cap", scaling.layer_cap, "budget cap (0 = auto)")
      ->default_val("0");

  int selftest_trials = 25;
  int selftest_krylov = 40;
  std::uint64_t selftest_seed = 20260808;
  CLI::App* selftest_cmd = app.add_subcommand("selftest", "randomized invariant suite");
  selftest_cmd->add_option("--trials", selftest_trials, "trials per check")->default_val("25");
  selftest_cmd->add_option("--krylov-trials", selftest_krylov, "Krylov comparisons")
      ->default_val("40");
  selftest_cmd->add_option("--seed", selftest_seed, "suite seed")->default_val("20260808");

  try {
    const std::vector<std::string> args = merge_config_file(raw_args);
    // CLI11 parses reversed argv-style vectors.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (single_cmd->parsed()) return run_single(single, out);
    if (sweep_noise_cmd->parsed()) return run_probability_sweep(sweep_noise, "sweep-noise", out);
    if (sweep_r_cmd->parsed()) return run_probability_sweep(sweep_r, "sweep-r", out);
    if (scaling_cmd->parsed()) return run_scaling(scaling, out);
    if (selftest_cmd->parsed()) {
      return run_selftest(selftest_trials, selftest_krylov, selftest_seed, out);
    }
    err << "config error: no subcommand given\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "runtime failure: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace rqs::cli
