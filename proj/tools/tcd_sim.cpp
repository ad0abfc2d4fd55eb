#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tcd/scenario.hpp"
#include "tcd/validation.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw tcd::ConfigError("cannot read config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct CommonFlags {
  std::string config_path;
  std::string preset;
  std::string out_dir;
  std::string format;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool plot = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON scenario configuration file");
  cmd->add_option("--preset", flags.preset,
                  "environment preset: isolated | small-wavelength | large-wavelength | mixed");
  cmd->add_option("--out", flags.out_dir, "output directory (overrides the config)");
}

tcd::ScenarioConfig load_config(const CommonFlags& flags) {
  tcd::ScenarioConfig cfg = flags.config_path.empty()
                                ? tcd::default_config()
                                : tcd::parse_config_text(read_file(flags.config_path));
  if (!flags.preset.empty()) tcd::apply_preset(cfg, flags.preset);
  if (!flags.out_dir.empty()) cfg.output.dir = flags.out_dir;
  if (!flags.format.empty()) {
    if (flags.format == "csv") {
      cfg.output.format = tcd::OutputFormat::csv;
    } else if (flags.format == "json") {
      cfg.output.format = tcd::OutputFormat::json;
    } else {
      throw tcd::ConfigError("--format expects 'csv' or 'json'");
    }
  }
  if (flags.seed_set) {
    if (cfg.montecarlo) {
      cfg.montecarlo->config.seed = flags.seed;
    } else {
      std::cerr << "note: --seed has no effect without a montecarlo block\n";
    }
  }
  if (flags.plot) cfg.output.plot_script = true;
  return cfg;
}

int cmd_run(const CommonFlags& flags) {
  const tcd::ScenarioConfig cfg = load_config(flags);
  const tcd::RunResult result = tcd::run_scenario(cfg);
  const std::vector<std::string> files = tcd::emit(result, cfg);

  for (const std::string& w : result.warnings) std::cerr << "warning: " << w << "\n";
  std::printf("visibility (%s): %.12g  [model expectation %.12g, diff %.3g]\n",
              result.visibility.method == tcd::VisibilityMethod::minmax ? "minmax" : "fourier",
              result.visibility.v, result.visibility_expected,
              std::abs(result.visibility.v - result.visibility_expected));
  if (result.montecarlo) {
    std::printf("montecarlo: %llu events, tv %.5f, chi2 %.2f (dof %zu%s)\n",
                static_cast<unsigned long long>(result.montecarlo->histogram.total),
                result.montecarlo->tv, result.montecarlo->chi2.statistic,
                result.montecarlo->chi2.dof,
                result.montecarlo->chi2.degenerate ? ", degenerate" : "");
  }
  for (const std::string& f : files) std::printf("wrote %s\n", f.c_str());
  return 0;
}

int cmd_sweep(const CommonFlags& flags, const std::string& param, double start, double stop,
              std::size_t steps) {
  const tcd::ScenarioConfig cfg = load_config(flags);
  tcd::SweepSpec spec;
  if (param == "n") {
    spec.parameter = tcd::SweepSpec::Parameter::near_amplitude;
  } else if (param == "w1") {
    spec.parameter = tcd::SweepSpec::Parameter::w1;
  } else if (param == "p2") {
    spec.parameter = tcd::SweepSpec::Parameter::two_sided_p;
  } else {
    throw tcd::ConfigError("--param expects one of n, w1, p2");
  }
  spec.start = start;
  spec.stop = stop;
  spec.steps = steps;

  const std::vector<tcd::SweepRow> rows = tcd::run_sweep(cfg, spec);
  const std::vector<std::string> files = tcd::emit_sweep(rows, spec, cfg);

  std::printf("%12s %18s %18s %12s  status\n", param.c_str(), "V(engine)", "V(expected)",
              "|diff|");
  for (const tcd::SweepRow& row : rows) {
    if (row.ok) {
      std::printf("%12.8f %18.12g %18.12g %12.3g  ok\n", row.value, row.visibility_engine,
                  row.visibility_expected, row.abs_diff);
    } else {
      std::printf("%12.8f %18s %18s %12s  %s\n", row.value, "-", "-", "-", row.note.c_str());
    }
  }
  for (const std::string& f : files) std::printf("wrote %s\n", f.c_str());
  return 0;
}

int cmd_validate(const CommonFlags& flags) {
  if (!flags.config_path.empty()) {
    tcd::parse_config_text(read_file(flags.config_path));  // config errors exit 2
  }
  const std::vector<tcd::validation::CheckResult> results = tcd::validation::run_all();
  for (const auto& r : results) {
    std::printf("[%s] %s — %s (%.2f s)\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                r.detail.c_str(), r.seconds);
  }
  return tcd::validation::all_passed(results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-particle interferometer simulator with environment-induced decoherence"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "evaluate one scenario and write the result files");
  add_common(run, run_flags);
  run->add_option("--format", run_flags.format, "output format: csv | json");
  CLI::Option* seed_opt = run->add_option("--seed", run_flags.seed, "Monte Carlo seed override");
  run->add_flag("--plot", run_flags.plot, "also write a gnuplot script next to the CSV output");

  CommonFlags sweep_flags;
  std::string sweep_param;
  double sweep_start = 0.0, sweep_stop = 0.0;
  std::size_t sweep_steps = 11;
  CLI::App* sweep =
      app.add_subcommand("sweep", "sweep one environment parameter and tabulate visibility");
  add_common(sweep, sweep_flags);
  sweep->add_option("--param", sweep_param, "swept parameter: n | w1 | p2")->required();
  sweep->add_option("--start", sweep_start, "first value")->required();
  sweep->add_option("--stop", sweep_stop, "last value")->required();
  sweep->add_option("--steps", sweep_steps, "number of values (>= 1)");

  CommonFlags validate_flags;
  CLI::App* validate =
      app.add_subcommand("validate", "run the built-in invariant and oracle suite");
  validate->add_option("--config", validate_flags.config_path,
                       "configuration to parse-check before the suite runs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    run_flags.seed_set = seed_opt->count() > 0;
    if (run->parsed()) return cmd_run(run_flags);
    if (sweep->parsed()) return cmd_sweep(sweep_flags, sweep_param, sweep_start, sweep_stop,
                                          sweep_steps);
    if (validate->parsed()) return cmd_validate(validate_flags);
  } catch (const tcd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const tcd::ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const tcd::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
