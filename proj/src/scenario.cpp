#include "tcd/scenario.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <thread>

#include <json.hpp>

namespace tcd {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError("config field " + where + ": " + what);
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) known = known || it.key() == key;
    if (!known) fail(where + "/" + it.key(), "unknown field");
  }
}

double as_double(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

std::uint64_t as_uint(const json& j, const std::string& where) {
  if (!j.is_number_unsigned()) fail(where, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

bool as_bool(const json& j, const std::string& where) {
  if (!j.is_boolean()) fail(where, "expected a boolean");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

// Record amplitudes are plain numbers in configs; a [re, im] pair is also
// accepted so programmatic configurations round-trip losslessly.
Complex as_amplitude(const json& j, const std::string& where) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return Complex(j[0].get<double>(), j[1].get<double>());
  }
  fail(where, "expected a number or [re, im]");
}

json amplitude_to_json(const Complex& a) {
  if (a.imag() == 0.0) return json(a.real());
  return json::array({a.real(), a.imag()});
}

std::optional<PartialWhichPath> parse_inner(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  if (!j.contains("model")) fail(where + "/model", "required");
  const std::string model = as_string(j.at("model"), where + "/model");
  if (model == "full") {
    check_keys(j, where, {"model"});
    return std::nullopt;
  }
  if (model == "partial") {
    check_keys(j, where, {"model", "n", "m"});
    if (!j.contains("n")) fail(where + "/n", "required");
    const Complex n = as_amplitude(j.at("n"), where + "/n");
    if (j.contains("m")) {
      return PartialWhichPath::make(n, as_amplitude(j.at("m"), where + "/m"));
    }
    if (n.imag() != 0.0) fail(where + "/m", "required when n is complex");
    return PartialWhichPath::from_near_amplitude(n.real());
  }
  fail(where + "/model", "expected 'full' or 'partial'");
}

json inner_to_json(const std::optional<PartialWhichPath>& inner) {
  if (!inner) return json{{"model", "full"}};
  return json{{"model", "partial"},
              {"n", amplitude_to_json(inner->near_amp)},
              {"m", amplitude_to_json(inner->far_amp)}};
}

EnvironmentModel parse_environment(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  if (!j.contains("model")) fail(where + "/model", "required");
  const std::string model = as_string(j.at("model"), where + "/model");
  if (model == "isolated") {
    check_keys(j, where, {"model"});
    return Isolated{};
  }
  if (model == "full") {
    check_keys(j, where, {"model"});
    return FullDecoherence{};
  }
  if (model == "partial") {
    return *parse_inner(j, where);  // partial inner parse, never nullopt here
  }
  if (model == "mixed") {
    check_keys(j, where, {"model", "w1", "inner"});
    if (!j.contains("w1")) fail(where + "/w1", "required");
    const double w1 = as_double(j.at("w1"), where + "/w1");
    std::optional<PartialWhichPath> inner;
    if (j.contains("inner")) inner = parse_inner(j.at("inner"), where + "/inner");
    return IntensityMixture::make(w1, inner);
  }
  if (model == "two_sided") {
    check_keys(j, where, {"model", "p_a", "p_b", "inner"});
    if (!j.contains("p_a") || !j.contains("p_b")) fail(where, "p_a and p_b are required");
    const double pa = as_double(j.at("p_a"), where + "/p_a");
    const double pb = as_double(j.at("p_b"), where + "/p_b");
    std::optional<PartialWhichPath> inner;
    if (j.contains("inner")) inner = parse_inner(j.at("inner"), where + "/inner");
    return TwoSidedSources::make(pa, pb, inner);
  }
  fail(where + "/model", "unknown environment model '" + model + "'");
}

json environment_to_json(const EnvironmentModel& model) {
  struct Visitor {
    json operator()(const Isolated&) const { return json{{"model", "isolated"}}; }
    json operator()(const FullDecoherence&) const { return json{{"model", "full"}}; }
    json operator()(const PartialWhichPath& p) const {
      return json{{"model", "partial"},
                  {"n", amplitude_to_json(p.near_amp)},
                  {"m", amplitude_to_json(p.far_amp)}};
    }
    json operator()(const IntensityMixture& m) const {
      return json{{"model", "mixed"}, {"w1", m.w1}, {"inner", inner_to_json(m.which_path)}};
    }
    json operator()(const TwoSidedSources& t) const {
      return json{{"model", "two_sided"},
                  {"p_a", t.p_a},
                  {"p_b", t.p_b},
                  {"inner", inner_to_json(t.which_path)}};
    }
  };
  return std::visit(Visitor{}, model);
}

AmplitudeMode parse_mode(const std::string& name, const std::string& where) {
  if (name == "spherical") return AmplitudeMode::spherical;
  if (name == "fraunhofer_full") return AmplitudeMode::fraunhofer_full;
  if (name == "fraunhofer_flat") return AmplitudeMode::fraunhofer_flat;
  fail(where, "unknown amplitude mode '" + name + "'");
}

const char* mode_name(AmplitudeMode mode) {
  switch (mode) {
    case AmplitudeMode::spherical: return "spherical";
    case AmplitudeMode::fraunhofer_full: return "fraunhofer_full";
    case AmplitudeMode::fraunhofer_flat: return "fraunhofer_flat";
  }
  return "?";
}

}  // namespace

ScenarioConfig default_config() { return ScenarioConfig{}; }

void apply_preset(ScenarioConfig& cfg, const std::string& name) {
  if (name == "isolated") {
    cfg.environment = Isolated{};
  } else if (name == "small-wavelength") {
    cfg.environment = PartialWhichPath::small_wavelength();
  } else if (name == "large-wavelength") {
    cfg.environment = PartialWhichPath::large_wavelength();
  } else if (name == "mixed") {
    cfg.environment = IntensityMixture::make(0.5);
  } else {
    throw ConfigError("unknown preset '" + name +
                      "' (expected isolated, small-wavelength, large-wavelength or mixed)");
  }
}

ScenarioConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  check_keys(j, "", {"geometry", "grid", "mode", "environment", "visibility_method",
                     "montecarlo", "output"});

  ScenarioConfig cfg = default_config();
  try {
    if (j.contains("geometry")) {
      const json& g = j.at("geometry");
      if (!g.is_object()) fail("/geometry", "expected an object");
      check_keys(g, "/geometry", {"slit_separation", "screen_distance", "wavelength"});
      if (g.contains("slit_separation")) {
        cfg.slit_separation = as_double(g.at("slit_separation"), "/geometry/slit_separation");
      }
      if (g.contains("screen_distance")) {
        cfg.screen_distance = as_double(g.at("screen_distance"), "/geometry/screen_distance");
      }
      if (g.contains("wavelength")) {
        cfg.wavelength = as_double(g.at("wavelength"), "/geometry/wavelength");
      }
    }
    if (j.contains("grid")) {
      const json& g = j.at("grid");
      if (!g.is_object()) fail("/grid", "expected an object");
      check_keys(g, "/grid", {"y_min", "y_max", "points"});
      double y_min = cfg.grid.y_min, y_max = cfg.grid.y_max;
      std::size_t points = cfg.grid.points;
      if (g.contains("y_min")) y_min = as_double(g.at("y_min"), "/grid/y_min");
      if (g.contains("y_max")) y_max = as_double(g.at("y_max"), "/grid/y_max");
      if (g.contains("points")) {
        points = static_cast<std::size_t>(as_uint(g.at("points"), "/grid/points"));
      }
      cfg.grid = make_screen_grid(y_min, y_max, points);
    }
    if (j.contains("mode")) {
      cfg.mode = parse_mode(as_string(j.at("mode"), "/mode"), "/mode");
    }
    if (j.contains("environment")) {
      cfg.environment = parse_environment(j.at("environment"), "/environment");
    }
    if (j.contains("visibility_method")) {
      const std::string m = as_string(j.at("visibility_method"), "/visibility_method");
      if (m == "minmax") {
        cfg.visibility_method = VisibilityMethod::minmax;
      } else if (m == "fourier") {
        cfg.visibility_method = VisibilityMethod::fourier;
      } else {
        fail("/visibility_method", "expected 'minmax' or 'fourier'");
      }
    }
    if (j.contains("montecarlo")) {
      const json& m = j.at("montecarlo");
      if (!m.is_object()) fail("/montecarlo", "expected an object");
      check_keys(m, "/montecarlo",
                 {"samples", "seed", "bins", "resolution", "workers", "delta_y_min",
                  "delta_y_max", "collect_2d"});
      MonteCarloSpec spec;
      if (m.contains("samples")) spec.config.samples = as_uint(m.at("samples"), "/montecarlo/samples");
      if (m.contains("seed")) spec.config.seed = as_uint(m.at("seed"), "/montecarlo/seed");
      if (m.contains("bins")) {
        spec.config.bins = static_cast<std::size_t>(as_uint(m.at("bins"), "/montecarlo/bins"));
      }
      if (m.contains("resolution")) {
        spec.config.resolution =
            static_cast<std::size_t>(as_uint(m.at("resolution"), "/montecarlo/resolution"));
      }
      if (m.contains("workers")) {
        spec.workers = static_cast<unsigned>(as_uint(m.at("workers"), "/montecarlo/workers"));
        if (spec.workers < 1) fail("/montecarlo/workers", "must be at least 1");
      }
      if (m.contains("delta_y_min")) {
        spec.config.delta_y_min = as_double(m.at("delta_y_min"), "/montecarlo/delta_y_min");
      }
      if (m.contains("delta_y_max")) {
        spec.config.delta_y_max = as_double(m.at("delta_y_max"), "/montecarlo/delta_y_max");
      }
      if (m.contains("collect_2d")) {
        spec.config.collect_2d = as_bool(m.at("collect_2d"), "/montecarlo/collect_2d");
      }
      spec.config.validate();
      cfg.montecarlo = spec;
    }
    if (j.contains("output")) {
      const json& o = j.at("output");
      if (!o.is_object()) fail("/output", "expected an object");
      check_keys(o, "/output", {"dir", "format", "plot_script"});
      if (o.contains("dir")) cfg.output.dir = as_string(o.at("dir"), "/output/dir");
      if (o.contains("format")) {
        const std::string f = as_string(o.at("format"), "/output/format");
        if (f == "csv") {
          cfg.output.format = OutputFormat::csv;
        } else if (f == "json") {
          cfg.output.format = OutputFormat::json;
        } else {
          fail("/output/format", "expected 'csv' or 'json'");
        }
      }
      if (o.contains("plot_script")) {
        cfg.output.plot_script = as_bool(o.at("plot_script"), "/output/plot_script");
      }
    }
    // Surface invariant violations (geometry, model) as config errors.
    cfg.geometry();
    validate_model(cfg.environment);
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

namespace {

json config_to_json(const ScenarioConfig& cfg) {
  json j;
  j["geometry"] = {{"slit_separation", cfg.slit_separation},
                   {"screen_distance", cfg.screen_distance},
                   {"wavelength", cfg.wavelength}};
  j["grid"] = {{"y_min", cfg.grid.y_min},
               {"y_max", cfg.grid.y_max},
               {"points", cfg.grid.points}};
  j["mode"] = mode_name(cfg.mode);
  j["environment"] = environment_to_json(cfg.environment);
  j["visibility_method"] =
      cfg.visibility_method == VisibilityMethod::minmax ? "minmax" : "fourier";
  if (cfg.montecarlo) {
    json m = {{"samples", cfg.montecarlo->config.samples},
              {"seed", cfg.montecarlo->config.seed},
              {"bins", cfg.montecarlo->config.bins},
              {"resolution", cfg.montecarlo->config.resolution},
              {"workers", cfg.montecarlo->workers},
              {"collect_2d", cfg.montecarlo->config.collect_2d}};
    if (cfg.montecarlo->config.has_delta_range()) {
      m["delta_y_min"] = cfg.montecarlo->config.delta_y_min;
      m["delta_y_max"] = cfg.montecarlo->config.delta_y_max;
    }
    j["montecarlo"] = m;
  }
  j["output"] = {{"dir", cfg.output.dir},
                 {"format", cfg.output.format == OutputFormat::csv ? "csv" : "json"},
                 {"plot_script", cfg.output.plot_script}};
  return j;
}

}  // namespace

std::string config_to_json_text(const ScenarioConfig& cfg) {
  return config_to_json(cfg).dump(2) + "\n";
}

RunResult run_scenario(const ScenarioConfig& cfg) {
  validate_model(cfg.environment);
  const Geometry g = cfg.geometry();

  RunResult out;
  if (g.far_field_strained()) {
    out.warnings.push_back("d/L exceeds 0.1: far-field linearization is strained");
  }

  const DensityOperator rho_pair = reduced_density(cfg.environment);
  const DensityOperator rho_a = partial_trace(rho_pair, {labels::a_slit});
  out.single_particle = single_particle_density(rho_a, g, cfg.mode, cfg.grid);
  out.joint = joint_density(rho_pair, g, cfg.mode, cfg.grid, cfg.grid);

  // dy profile: engine values at the centered representative pairs
  // (c + dy/2, c - dy/2) next to the model's closed form.
  const double span = cfg.grid.span();
  const double center = 0.5 * (cfg.grid.y_min + cfg.grid.y_max);
  const std::size_t profile_points = 2 * cfg.grid.points - 1;
  const auto closed = closed_form_profile(cfg.environment, g);
  out.delta_y.resize(profile_points);
  out.delta_engine.resize(profile_points);
  out.delta_closed.resize(profile_points);
  for (std::size_t k = 0; k < profile_points; ++k) {
    const double dy =
        -span + 2.0 * span * static_cast<double>(k) / static_cast<double>(profile_points - 1);
    out.delta_y[k] = dy;
    out.delta_engine[k] =
        joint_density_at(rho_pair, g, cfg.mode, center + dy / 2.0, center - dy / 2.0);
    out.delta_closed[k] = closed(dy);
  }

  out.visibility = visibility(out.joint, g, cfg.visibility_method);
  out.visibility_expected = std::abs(fringe_contrast(cfg.environment));

  if (cfg.montecarlo) {
    MonteCarloReport report;
    report.workers = cfg.montecarlo->workers;
    const SampleResult sampled =
        sample_events(cfg.environment, g, cfg.mode, cfg.grid, cfg.grid, cfg.montecarlo->config,
                      cfg.montecarlo->workers);
    report.histogram = sampled.histogram;
    report.stats = sampled.stats;
    report.analytic = analytic_delta_profile(cfg.environment, g, cfg.mode, cfg.grid, cfg.grid,
                                             cfg.montecarlo->config);
    report.tv = tv_distance(report.histogram, report.analytic);
    report.chi2 = chi2_statistic(report.histogram, report.analytic);
    out.montecarlo = std::move(report);
  }
  return out;
}

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open for writing: " + path.string());
  f << content;
  f.flush();
  if (!f) throw ConfigError("write failed: " + path.string());
}

std::string csv_single_particle(const RunResult& r) {
  std::string s = "y,rho\n";
  const std::vector<double> ys = r.single_particle.grid.coordinates();
  for (std::size_t i = 0; i < ys.size(); ++i) {
    s += fmt17(ys[i]);
    s += ',';
    s += fmt17(r.single_particle.values[i]);
    s += '\n';
  }
  return s;
}

std::string csv_joint(const RunResult& r) {
  std::string s = "ya,yb,rho\n";
  const std::vector<double> ya = r.joint.grid_a.coordinates();
  const std::vector<double> yb = r.joint.grid_b.coordinates();
  s.reserve(ya.size() * yb.size() * 48);
  for (std::size_t i = 0; i < ya.size(); ++i) {
    for (std::size_t j = 0; j < yb.size(); ++j) {
      s += fmt17(ya[i]);
      s += ',';
      s += fmt17(yb[j]);
      s += ',';
      s += fmt17(r.joint.at(i, j));
      s += '\n';
    }
  }
  return s;
}

std::string csv_delta_profile(const RunResult& r) {
  std::string s = "delta_y,engine,closed_form\n";
  for (std::size_t k = 0; k < r.delta_y.size(); ++k) {
    s += fmt17(r.delta_y[k]);
    s += ',';
    s += fmt17(r.delta_engine[k]);
    s += ',';
    s += fmt17(r.delta_closed[k]);
    s += '\n';
  }
  return s;
}

std::string csv_visibility(const RunResult& r) {
  std::string s = "method,v,v_expected,max_density,min_density\n";
  s += r.visibility.method == VisibilityMethod::minmax ? "minmax" : "fourier";
  s += ',';
  s += fmt17(r.visibility.v);
  s += ',';
  s += fmt17(r.visibility_expected);
  s += ',';
  s += fmt17(r.visibility.max_density);
  s += ',';
  s += fmt17(r.visibility.min_density);
  s += '\n';
  return s;
}

std::string csv_histogram(const MonteCarloReport& mc) {
  std::string s = "delta_lo,delta_hi,count,analytic_prob\n";
  for (std::size_t b = 0; b < mc.histogram.counts.size(); ++b) {
    s += fmt17(mc.histogram.edges[b]);
    s += ',';
    s += fmt17(mc.histogram.edges[b + 1]);
    s += ',';
    s += std::to_string(mc.histogram.counts[b]);
    s += ',';
    s += fmt17(mc.analytic.probs[b]);
    s += '\n';
  }
  return s;
}

std::string csv_mc_stats(const MonteCarloReport& mc) {
  std::string s =
      "samples,workers,tv_distance,chi2_statistic,chi2_dof,chi2_degenerate,scattered,"
      "near_records\n";
  s += std::to_string(mc.histogram.total);
  s += ',';
  s += std::to_string(mc.workers);
  s += ',';
  s += fmt17(mc.tv);
  s += ',';
  s += fmt17(mc.chi2.statistic);
  s += ',';
  s += std::to_string(mc.chi2.dof);
  s += ',';
  s += mc.chi2.degenerate ? "1" : "0";
  s += ',';
  s += std::to_string(mc.stats.scattered);
  s += ',';
  s += std::to_string(mc.stats.near_records);
  s += '\n';
  return s;
}

std::string plot_script_text() {
  return
      "set datafile separator comma\n"
      "set key autotitle columnheader\n"
      "set xlabel 'ya - yb (m)'\n"
      "set ylabel 'density'\n"
      "set term pngcairo size 1100,750\n"
      "set output 'delta_profile.png'\n"
      "plot 'delta_profile.csv' using 1:2 with lines, '' using 1:3 with lines\n"
      "set output 'single_particle.png'\n"
      "set xlabel 'y (m)'\n"
      "plot 'single_particle.csv' using 1:2 with lines\n";
}

json montecarlo_to_json(const MonteCarloReport& mc) {
  json h;
  h["edges"] = mc.histogram.edges;
  h["counts"] = mc.histogram.counts;
  h["total"] = mc.histogram.total;
  json stats = {{"scattered", mc.stats.scattered},
                {"near_records", mc.stats.near_records},
                {"workers", mc.workers}};
  json chi2 = {{"statistic", mc.chi2.statistic},
               {"dof", mc.chi2.dof},
               {"degenerate", mc.chi2.degenerate}};
  return json{{"histogram", h},
              {"analytic_probs", mc.analytic.probs},
              {"tv_distance", mc.tv},
              {"chi2", chi2},
              {"stats", stats}};
}

json visibility_to_json(const RunResult& r) {
  return json{{"method", r.visibility.method == VisibilityMethod::minmax ? "minmax" : "fourier"},
              {"v", r.visibility.v},
              {"v_expected", r.visibility_expected},
              {"max_density", r.visibility.max_density},
              {"min_density", r.visibility.min_density}};
}

}  // namespace

std::vector<std::string> emit(const RunResult& result, const ScenarioConfig& cfg) {
  const fs::path dir(cfg.output.dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory: " + dir.string());

  std::vector<std::string> written;
  auto emit_file = [&](const char* name, const std::string& content) {
    const fs::path p = dir / name;
    write_file(p, content);
    written.push_back(p.string());
  };

  if (cfg.output.format == OutputFormat::json) {
    json maps;
    maps["single_particle"] = {{"y", result.single_particle.grid.coordinates()},
                               {"rho", result.single_particle.values}};
    maps["joint"] = {{"ya", result.joint.grid_a.coordinates()},
                     {"yb", result.joint.grid_b.coordinates()},
                     {"rho", result.joint.values}};
    maps["delta_profile"] = {{"delta_y", result.delta_y},
                             {"engine", result.delta_engine},
                             {"closed_form", result.delta_closed}};
    json bundle;
    bundle["config"] = config_to_json(cfg);
    bundle["maps"] = maps;
    bundle["visibility"] = visibility_to_json(result);
    bundle["montecarlo"] =
        result.montecarlo ? montecarlo_to_json(*result.montecarlo) : json(nullptr);
    emit_file("result.json", bundle.dump(2) + "\n");
    return written;
  }

  emit_file("config.json", config_to_json_text(cfg));
  emit_file("single_particle.csv", csv_single_particle(result));
  emit_file("joint_density.csv", csv_joint(result));
  emit_file("delta_profile.csv", csv_delta_profile(result));
  emit_file("visibility.csv", csv_visibility(result));
  if (result.montecarlo) {
    emit_file("histogram.csv", csv_histogram(*result.montecarlo));
    emit_file("mc_stats.csv", csv_mc_stats(*result.montecarlo));
  }
  if (cfg.output.plot_script) emit_file("plot.gp", plot_script_text());
  return written;
}

void SweepSpec::validate() const {
  if (steps < 1) throw ConfigError("sweep needs at least one step");
  if (!(start <= stop)) throw ConfigError("sweep start must not exceed stop");
  if (!std::isfinite(start) || !std::isfinite(stop)) {
    throw ConfigError("sweep bounds must be finite");
  }
}

namespace {

EnvironmentModel sweep_model(SweepSpec::Parameter parameter, double value,
                             const std::optional<PartialWhichPath>& record_model) {
  switch (parameter) {
    case SweepSpec::Parameter::near_amplitude: {
      if (value < 0.5 - 1e-12 || value > 1.0 / std::sqrt(2.0) + 1e-12) {
        throw ValidationError("n outside [1/2, 1/sqrt 2]");
      }
      return PartialWhichPath::from_near_amplitude(std::min(value, 1.0 / std::sqrt(2.0)));
    }
    case SweepSpec::Parameter::w1:
      return IntensityMixture::make(value, record_model);
    case SweepSpec::Parameter::two_sided_p:
      return TwoSidedSources::make(value, value, record_model);
  }
  throw ValidationError("unknown sweep parameter");
}

}  // namespace

std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg, const SweepSpec& sweep) {
  sweep.validate();
  const Geometry g = cfg.geometry();
  // Sweeping w1 or p holds the configured record amplitudes fixed.
  const std::optional<PartialWhichPath> record_model = as_mixture(cfg.environment).which_path;

  std::vector<SweepRow> rows(sweep.steps);
  std::atomic<std::size_t> next{0};
  auto run_rows = [&]() {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= sweep.steps) break;
      SweepRow& row = rows[k];
      row.value = sweep.steps == 1 ? sweep.start
                                   : sweep.start + (sweep.stop - sweep.start) *
                                                       static_cast<double>(k) /
                                                       static_cast<double>(sweep.steps - 1);
      try {
        const EnvironmentModel model = sweep_model(sweep.parameter, row.value, record_model);
        const DensityMap2D map =
            joint_density(reduced_density(model), g, cfg.mode, cfg.grid, cfg.grid);
        row.visibility_engine = visibility(map, g, cfg.visibility_method).v;
        row.visibility_expected = std::abs(fringe_contrast(model));
        row.abs_diff = std::abs(row.visibility_engine - row.visibility_expected);
        row.ok = true;
      } catch (const std::exception& e) {
        row.ok = false;
        row.note = e.what();
      }
    }
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(sweep.steps, std::min(hw, 8u)));
  if (workers <= 1) {
    run_rows();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run_rows);
    for (std::thread& t : pool) t.join();
  }
  return rows;
}

std::vector<std::string> emit_sweep(const std::vector<SweepRow>& rows, const SweepSpec& sweep,
                                    const ScenarioConfig& cfg) {
  const fs::path dir(cfg.output.dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory: " + dir.string());

  const char* name = "";
  switch (sweep.parameter) {
    case SweepSpec::Parameter::near_amplitude: name = "n"; break;
    case SweepSpec::Parameter::w1: name = "w1"; break;
    case SweepSpec::Parameter::two_sided_p: name = "p2"; break;
  }
  std::string s = "parameter,value,visibility_engine,visibility_expected,abs_diff,status\n";
  for (const SweepRow& row : rows) {
    s += name;
    s += ',';
    s += fmt17(row.value);
    s += ',';
    if (row.ok) {
      s += fmt17(row.visibility_engine);
      s += ',';
      s += fmt17(row.visibility_expected);
      s += ',';
      s += fmt17(row.abs_diff);
      s += ",ok\n";
    } else {
      std::string note = row.note;
      for (char& c : note) {
        if (c == ',' || c == '\n') c = ';';
      }
      s += ",,,error: " + note + "\n";
    }
  }
  const fs::path p = dir / "sweep.csv";
  write_file(p, s);
  return {p.string()};
}

}  // namespace tcd
