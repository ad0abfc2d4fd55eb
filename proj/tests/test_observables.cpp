#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tcd/observables.hpp"
#include "tcd/rng.hpp"

using namespace tcd;

namespace {

Geometry default_geometry() { return geometry_from_wavelength(10e-6, 1.0, 650e-9); }

// Screen grid spanning one full coincidence fringe period per axis, with
// points placed so the fringe nulls land exactly on sampled differences.
ScreenGrid period_grid(const Geometry& g, std::size_t points = 101) {
  const double half = coincidence_fringe_period(g) / 2.0;
  return make_screen_grid(-half, half, points);
}

ScreenGrid default_grid(std::size_t points = 81) {
  return make_screen_grid(-0.002, 0.002, points);
}

DensityMap2D model_map(const EnvironmentModel& model, const Geometry& g, const ScreenGrid& grid,
                       AmplitudeMode mode = AmplitudeMode::fraunhofer_flat) {
  return joint_density(reduced_density(model), g, mode, grid, grid);
}

}  // namespace

TEST_SUITE("observables") {

TEST_CASE("maximally mixed single-particle density is exactly flat") {
  const Geometry g = default_geometry();
  const DensityOperator rho_a =
      partial_trace(dm_from_state(initial_state()), {labels::a_slit});
  const DensityMap1D map =
      single_particle_density(rho_a, g, AmplitudeMode::fraunhofer_flat, default_grid());
  for (double v : map.values) CHECK(std::abs(v - 1.0) < 1e-12);
}

TEST_CASE("a coherent single-particle state would show cos^2 fringes") {
  const Geometry g = default_geometry();
  const double r = 1.0 / std::sqrt(2.0);
  const DensityOperator plus =
      dm_from_state(make_state(HilbertLayout{{{labels::a_slit, 2}}}, {r, r}));
  const ScreenGrid grid = default_grid();
  const DensityMap1D map = single_particle_density(plus, g, AmplitudeMode::fraunhofer_flat, grid);
  const std::vector<double> ys = grid.coordinates();
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double c = std::cos(g.wavenumber * g.theta() * ys[i]);
    CHECK(std::abs(map.values[i] - 2.0 * c * c) < 1e-12);
  }
}

TEST_CASE("single-slit density carries no fringe") {
  const Geometry g = default_geometry();
  const DensityOperator slit1 =
      dm_from_state(basis_state(HilbertLayout{{{labels::a_slit, 2}}}, {0}));
  const ScreenGrid grid = default_grid();
  const DensityMap1D map = single_particle_density(slit1, g, AmplitudeMode::fraunhofer_flat, grid);
  const FringeFit fit =
      fit_fringe(grid.coordinates(), map.values, 2.0 * g.wavenumber * g.theta());
  CHECK(fit.amplitude() <= 1e-12 * fit.mean);
}

TEST_CASE("single_particle_density validates the operator layout") {
  const Geometry g = default_geometry();
  CHECK_THROWS_AS(single_particle_density(dm_from_state(initial_state()), g,
                                          AmplitudeMode::fraunhofer_flat, default_grid()),
                  LayoutError);
}

TEST_CASE("isolated joint density reproduces the cos^2 fringe profile") {
  const Geometry g = default_geometry();
  const ScreenGrid grid = default_grid();
  const DensityMap2D map = model_map(Isolated{}, g, grid);
  const std::vector<double> ys = grid.coordinates();

  std::vector<double> reference(map.values.size());
  for (std::size_t i = 0; i < ys.size(); ++i) {
    for (std::size_t j = 0; j < ys.size(); ++j) {
      reference[i * ys.size() + j] = closed_form_isolated(g, ys[i] - ys[j]);
    }
  }
  const double scale = least_squares_scale(map.values, reference);
  CHECK(scale == doctest::Approx(2.0).epsilon(1e-12));
  double worst = 0.0;
  for (std::size_t k = 0; k < map.values.size(); ++k) {
    worst = std::max(worst, std::abs(map.values[k] - scale * reference[k]));
  }
  CHECK(worst <= 1e-12 * 2.0);
}

TEST_CASE("perfect records flatten the joint density") {
  const Geometry g = default_geometry();
  const DensityMap2D map = model_map(FullDecoherence{}, g, default_grid());
  const auto [lo, hi] = std::minmax_element(map.values.begin(), map.values.end());
  const double mean = *lo / 2.0 + *hi / 2.0;
  CHECK((*hi - *lo) <= 1e-12 * mean);
}

TEST_CASE("partial records interpolate: engine matches the four-term closed form") {
  const Geometry g = default_geometry();
  const PartialWhichPath p = PartialWhichPath::make(0.6 / std::sqrt(2.0), 0.8 / std::sqrt(2.0));
  const ScreenGrid grid = default_grid(41);
  const DensityMap2D map = model_map(EnvironmentModel{p}, g, grid);
  const std::vector<double> ys = grid.coordinates();
  for (std::size_t i = 0; i < ys.size(); ++i) {
    for (std::size_t j = 0; j < ys.size(); ++j) {
      const double expect = 2.0 * closed_form_partial(g, p, ys[i] - ys[j]);
      CHECK(std::abs(map.at(i, j) - expect) < 1e-12);
    }
  }
}

TEST_CASE("intensity mixture matches its closed form at unit scale") {
  const Geometry g = default_geometry();
  const ScreenGrid grid = default_grid(41);
  const DensityMap2D map =
      model_map(EnvironmentModel{IntensityMixture::make(0.3)}, g, grid);
  const std::vector<double> ys = grid.coordinates();
  for (std::size_t i = 0; i < ys.size(); ++i) {
    for (std::size_t j = 0; j < ys.size(); ++j) {
      CHECK(std::abs(map.at(i, j) - closed_form_mixture(g, 0.3, ys[i] - ys[j])) < 1e-12);
    }
  }
}

TEST_CASE("flat-mode joint density depends on ya - yb only") {
  const Geometry g = default_geometry();
  const ScreenGrid grid = default_grid(61);
  const DensityMap2D map = model_map(EnvironmentModel{IntensityMixture::make(0.4)}, g, grid);
  for (std::size_t s : {1u, 5u, 17u}) {
    for (std::size_t i = 0; i + s < grid.points; ++i) {
      for (std::size_t j = 0; j + s < grid.points; ++j) {
        CHECK(std::abs(map.at(i, j) - map.at(i + s, j + s)) < 1e-12);
      }
    }
  }
}

TEST_CASE("non-positive operators are rejected at evaluation time") {
  const Geometry g = default_geometry();
  // Hermitian, unit trace, but with a -0.1 eigenvalue: the density goes
  // negative once the grid reaches the destructive fringe.
  auto rho = make_density(HilbertLayout{{{labels::a_slit, 2}}},
                          {Complex(0.5), Complex(0.6), Complex(0.6), Complex(0.5)});
  const ScreenGrid wide = make_screen_grid(-coincidence_fringe_period(g),
                                           coincidence_fringe_period(g), 101);
  CHECK_THROWS_AS(single_particle_density(rho, g, AmplitudeMode::fraunhofer_flat, wide),
                  NumericError);
}

TEST_CASE("closed-form spot values") {
  const Geometry g = default_geometry();
  CHECK(closed_form_isolated(g, 0.0) == 1.0);
  const double first_zero = std::numbers::pi / (2.0 * g.wavenumber * g.theta());
  CHECK(closed_form_isolated(g, first_zero) < 1e-30);
  CHECK(closed_form_full_decoherence(g, 0.123) == 1.0);
  for (double dy : {-0.01, 0.0, 0.0007}) {
    CHECK(closed_form_mixture(g, 1.0, dy) == 1.0);
    CHECK(std::abs(closed_form_mixture(g, 0.0, dy) - 2.0 * closed_form_isolated(g, dy)) < 1e-15);
    // cos^2 x = (1 + cos 2x)/2: the uninformative-record closed form equals
    // the isolated one.
    CHECK(std::abs(closed_form_partial(g, PartialWhichPath::large_wavelength(), dy) -
                   closed_form_isolated(g, dy)) < 1e-15);
  }
}

TEST_CASE("fringe contrast per model") {
  CHECK(fringe_contrast(Isolated{}) == 1.0);
  CHECK(fringe_contrast(FullDecoherence{}) == 0.0);
  CHECK(fringe_contrast(PartialWhichPath::small_wavelength()) ==
        doctest::Approx(0.0).epsilon(1e-14));
  CHECK(fringe_contrast(PartialWhichPath::large_wavelength()) ==
        doctest::Approx(1.0).epsilon(1e-14));
  const PartialWhichPath p = PartialWhichPath::from_near_amplitude(0.55);
  CHECK(fringe_contrast(p) ==
        doctest::Approx(4.0 * p.near_amp.real() * p.far_amp.real()).epsilon(1e-13));
  CHECK(fringe_contrast(IntensityMixture::make(0.3)) == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(fringe_contrast(TwoSidedSources::make(0.1, 0.1)) ==
        doctest::Approx(0.81).epsilon(1e-14));
}

TEST_CASE("visibility of the isolated pattern is 1, of the recorded one 0") {
  const Geometry g = default_geometry();
  const ScreenGrid wide = period_grid(g);
  const DensityMap2D fringes = model_map(Isolated{}, g, wide);
  const DensityMap2D flat = model_map(FullDecoherence{}, g, wide);

  const VisibilityReport vm = visibility(fringes, g, VisibilityMethod::minmax);
  CHECK(vm.v == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(vm.max_density == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(vm.min_density < 1e-12);
  CHECK(visibility(fringes, g, VisibilityMethod::fourier).v ==
        doctest::Approx(1.0).epsilon(1e-9));

  CHECK(visibility(flat, g, VisibilityMethod::minmax).v < 1e-12);
  CHECK(visibility(flat, g, VisibilityMethod::fourier).v < 1e-12);
}

TEST_CASE("minmax needs a full period; fourier does not") {
  const Geometry g = default_geometry();
  // The +-2 mm default grid covers about an eighth of a fringe period.
  const DensityMap2D narrow = model_map(Isolated{}, g, default_grid());
  CHECK_THROWS_AS(visibility(narrow, g, VisibilityMethod::minmax), InsufficientSpanError);
  CHECK(visibility(narrow, g, VisibilityMethod::fourier).v ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("visibility algebra: V = 4 n m on the normalization constraint") {
  const Geometry g = default_geometry();
  const ScreenGrid grid = period_grid(g, 61);
  const double lo = 0.5, hi = 1.0 / std::sqrt(2.0);
  for (int step = 0; step <= 10; ++step) {
    const double n = lo + (hi - lo) * step / 10.0;
    const PartialWhichPath p = PartialWhichPath::from_near_amplitude(n);
    const VisibilityReport rep =
        visibility(model_map(EnvironmentModel{p}, g, grid), g, VisibilityMethod::fourier);
    const double expected = 4.0 * p.near_amp.real() * p.far_amp.real();
    CHECK(std::abs(rep.v - expected) <= 1e-9);
  }
}

TEST_CASE("visibility mixture law: V = 1 - w1") {
  const Geometry g = default_geometry();
  const ScreenGrid grid = period_grid(g, 61);
  for (double w1 : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const DensityMap2D map = model_map(EnvironmentModel{IntensityMixture::make(w1)}, g, grid);
    CHECK(std::abs(visibility(map, g, VisibilityMethod::fourier).v - (1.0 - w1)) <= 1e-9);
  }
}

TEST_CASE("spherical-mode visibility stays near 1 for the isolated system") {
  const Geometry g = default_geometry();
  const DensityMap2D map =
      model_map(Isolated{}, g, period_grid(g, 61), AmplitudeMode::spherical);
  const double v = visibility(map, g, VisibilityMethod::fourier).v;
  CHECK(v > 0.999);
  CHECK(v < 1.0 + 1e-9);
}

TEST_CASE("normalize: constant map, idempotence, visibility invariance") {
  const Geometry g = default_geometry();
  const ScreenGrid grid = period_grid(g, 41);
  const DensityMap2D flat = model_map(FullDecoherence{}, g, grid);
  const DensityMap2D unit = normalize(flat);
  for (double v : unit.values) {
    CHECK(v == doctest::Approx(1.0 / static_cast<double>(unit.values.size())).epsilon(1e-12));
  }
  const DensityMap2D twice = normalize(unit);
  for (std::size_t k = 0; k < unit.values.size(); ++k) CHECK(twice.values[k] == unit.values[k]);

  const DensityMap2D fringes = model_map(Isolated{}, g, grid);
  const double before = visibility(fringes, g, VisibilityMethod::fourier).v;
  const double after = visibility(normalize(fringes), g, VisibilityMethod::fourier).v;
  CHECK(std::abs(before - after) < 1e-12);

  DensityMap2D zero = flat;
  for (double& v : zero.values) v = 0.0;
  CHECK_THROWS_AS(normalize(zero), ValidationError);
}

TEST_CASE("fit_fringe recovers synthetic coefficients on sub-period spans") {
  SplitMix64 rng(41);
  for (int round = 0; round < 20; ++round) {
    const double omega = rng.next_double(1.0, 100.0);
    const double span = rng.next_double(0.05, 6.0) / omega;  // down to ~1% of a period
    const double c0 = rng.next_double(0.5, 2.0);
    const double a = rng.next_double(-0.5, 0.5);
    const double b = rng.next_double(-0.5, 0.5);
    std::vector<double> x(301), v(301);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = -span + 2.0 * span * static_cast<double>(i) / 300.0;
      v[i] = c0 + a * std::cos(omega * x[i]) + b * std::sin(omega * x[i]);
    }
    const FringeFit fit = fit_fringe(x, v, omega);
    CHECK(std::abs(fit.mean - c0) < 1e-10);
    CHECK(std::abs(fit.cos_coef - a) < 1e-10);
    CHECK(std::abs(fit.sin_coef - b) < 1e-10);
  }
}

TEST_CASE("least_squares_scale recovers a pure scaling") {
  std::vector<double> ref(100), target(100);
  SplitMix64 rng(43);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    ref[i] = rng.next_double(0.1, 2.0);
    target[i] = 3.7 * ref[i];
  }
  CHECK(least_squares_scale(target, ref) == doctest::Approx(3.7).epsilon(1e-13));
}

TEST_CASE("property: visibility of any valid model stays in [0, 1]") {
  const Geometry g = default_geometry();
  const ScreenGrid grid = period_grid(g, 61);
  SplitMix64 rng(51);
  for (int round = 0; round < 25; ++round) {
    const double alpha = rng.next_double(0.0, std::numbers::pi / 2.0);
    const double r = 1.0 / std::sqrt(2.0);
    const PartialWhichPath p{Complex(r * std::cos(alpha), 0.0),
                             Complex(r * std::sin(alpha), 0.0)};
    const EnvironmentModel model = IntensityMixture::make(rng.next_double(), p);
    for (VisibilityMethod method : {VisibilityMethod::minmax, VisibilityMethod::fourier}) {
      const VisibilityReport rep = visibility(model_map(model, g, grid), g, method);
      CHECK(rep.v >= 0.0);
      CHECK(rep.v <= 1.0 + 1e-9);
      if (method == VisibilityMethod::minmax) {
        // The reported extrema and v satisfy the defining identity.
        CHECK(std::abs(rep.v - (rep.max_density - rep.min_density) /
                                   (rep.max_density + rep.min_density)) < 1e-12);
      }
    }
  }
}

TEST_CASE("single-particle fringe ratio stays below 1e-9 for every model") {
  const Geometry g = default_geometry();
  const ScreenGrid grid = default_grid();
  const std::vector<EnvironmentModel> models{
      Isolated{}, FullDecoherence{},
      PartialWhichPath::make(0.6 / std::sqrt(2.0), 0.8 / std::sqrt(2.0)),
      IntensityMixture::make(0.3), TwoSidedSources::make(0.1, 0.1)};
  for (const EnvironmentModel& model : models) {
    const DensityOperator rho_a = partial_trace(reduced_density(model), {labels::a_slit});
    const DensityMap1D map =
        single_particle_density(rho_a, g, AmplitudeMode::fraunhofer_flat, grid);
    const FringeFit fit =
        fit_fringe(grid.coordinates(), map.values, 2.0 * g.wavenumber * g.theta());
    CHECK(fit.amplitude() <= 1e-9 * fit.mean);
  }
}

}  // TEST_SUITE
