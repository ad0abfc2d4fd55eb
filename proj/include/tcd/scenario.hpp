#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tcd/channels.hpp"
#include "tcd/geometry.hpp"
#include "tcd/montecarlo.hpp"
#include "tcd/observables.hpp"

namespace tcd {

enum class OutputFormat { csv, json };

struct OutputSpec {
  std::string dir = "out";
  OutputFormat format = OutputFormat::csv;
  bool plot_script = false;
};

struct MonteCarloSpec {
  SampleConfig config;
  unsigned workers = 1;
};

/**
 * One simulation scenario: geometry (wavelength is the user-facing input,
 * k = 2 pi / lambda derived), detector grid (shared by both screens),
 * amplitude mode, environment model, optional Monte Carlo cross-check and
 * output destination.
 */
struct ScenarioConfig {
  double slit_separation = 10e-6;  // m
  double screen_distance = 1.0;    // m
  double wavelength = 650e-9;      // m
  ScreenGrid grid{-0.002, 0.002, 201};
  AmplitudeMode mode = AmplitudeMode::fraunhofer_flat;
  EnvironmentModel environment = Isolated{};
  VisibilityMethod visibility_method = VisibilityMethod::fourier;
  std::optional<MonteCarloSpec> montecarlo;
  OutputSpec output;

  Geometry geometry() const {
    return geometry_from_wavelength(slit_separation, screen_distance, wavelength);
  }
};

ScenarioConfig default_config();

// Named regimes: isolated, small-wavelength, large-wavelength, mixed.
void apply_preset(ScenarioConfig& cfg, const std::string& name);

// JSON <-> config.  Parse failures throw ConfigError naming the offending
// field; the emitted text re-parses to an equivalent configuration.
ScenarioConfig parse_config_text(const std::string& text);
std::string config_to_json_text(const ScenarioConfig& cfg);

struct MonteCarloReport {
  Histogram histogram;
  DeltaProfile analytic;
  double tv = 0.0;
  Chi2Result chi2;
  SampleStats stats;
  unsigned workers = 1;
};

struct RunResult {
  DensityMap1D single_particle;
  DensityMap2D joint;
  std::vector<double> delta_y;       // dy profile coordinates
  std::vector<double> delta_engine;  // engine values at (c + dy/2, c - dy/2)
  std::vector<double> delta_closed;  // model closed form (one scale away)
  VisibilityReport visibility;
  double visibility_expected = 0.0;  // |fringe contrast| of the model
  std::optional<MonteCarloReport> montecarlo;
  std::vector<std::string> warnings;
};

RunResult run_scenario(const ScenarioConfig& cfg);

// Write the result files into cfg.output.dir; returns the paths written.
// Output is byte-stable for identical configs (and seed, when sampling).
std::vector<std::string> emit(const RunResult& result, const ScenarioConfig& cfg);

struct SweepSpec {
  enum class Parameter {
    near_amplitude,  // real n in [1/2, 1/sqrt 2]; m = sqrt(1/2 - n^2)
    w1,              // scattering probability in [0, 1]
    two_sided_p,     // per-side scattering probability in [0, 1]
  };
  Parameter parameter = Parameter::near_amplitude;
  double start = 0.0;
  double stop = 0.0;
  std::size_t steps = 1;  // number of evaluated values (>= 1)

  void validate() const;
};

struct SweepRow {
  double value = 0.0;
  double visibility_engine = 0.0;
  double visibility_expected = 0.0;
  double abs_diff = 0.0;
  bool ok = false;
  std::string note;  // failure reason when not ok
};

// Rows are evaluated in parallel and gathered in sweep order; a value
// outside the parameter domain flags its row and the sweep continues.
std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg, const SweepSpec& sweep);

std::vector<std::string> emit_sweep(const std::vector<SweepRow>& rows, const SweepSpec& sweep,
                                    const ScenarioConfig& cfg);

}  // namespace tcd
