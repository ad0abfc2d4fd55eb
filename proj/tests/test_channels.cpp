#include <doctest.h>

#include <cmath>
#include <complex>

#include "tcd/channels.hpp"
#include "tcd/reference.hpp"
#include "tcd/rng.hpp"

using namespace tcd;

namespace {

std::size_t idx(std::size_t a, std::size_t b, std::size_t e) { return a * 6 + b * 3 + e; }

// Random which-path amplitudes on the constraint |n|^2 + |m|^2 = 1/2,
// with optional complex phases.
PartialWhichPath random_which_path(SplitMix64& rng, bool complex_phases) {
  const double alpha = rng.next_double(0.0, std::numbers::pi / 2.0);
  const double ph_n = complex_phases ? rng.next_double(0.0, 2.0 * std::numbers::pi) : 0.0;
  const double ph_m = complex_phases ? rng.next_double(0.0, 2.0 * std::numbers::pi) : 0.0;
  const double r = 1.0 / std::sqrt(2.0);
  return PartialWhichPath{std::polar(r * std::cos(alpha), ph_n),
                          std::polar(r * std::sin(alpha), ph_m)};
}

}  // namespace

TEST_SUITE("channels") {

TEST_CASE("initial state amplitudes and anti-correlation") {
  const StateVector psi = initial_state();
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(psi.amps[0] == Complex(0.0));
  CHECK(psi.amps[1] == Complex(r));
  CHECK(psi.amps[2] == Complex(r));
  CHECK(psi.amps[3] == Complex(0.0));
  CHECK(psi.norm_squared() == doctest::Approx(1.0).epsilon(1e-14));

  const DensityOperator rho_a = partial_trace(dm_from_state(psi), {labels::a_slit});
  CHECK(std::abs(rho_a.at(0, 0) - Complex(0.5)) < 1e-15);
  CHECK(std::abs(rho_a.at(1, 1) - Complex(0.5)) < 1e-15);
  CHECK(std::abs(rho_a.at(0, 1)) < 1e-15);
}

TEST_CASE("attach_environment products with the ready record state") {
  const StateVector v = attach_environment(initial_state());
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(v.amps.size() == 12);
  CHECK(std::abs(v.amps[idx(0, 1, 0)] - Complex(r)) < 1e-15);
  CHECK(std::abs(v.amps[idx(1, 0, 0)] - Complex(r)) < 1e-15);
  CHECK(v.norm_squared() == doctest::Approx(1.0).epsilon(1e-14));

  // Tracing the environment back out recovers the bare pair.
  const DensityOperator back = partial_trace(dm_from_state(v), {labels::a_slit, labels::b_slit});
  CHECK(max_abs_diff(back, dm_from_state(initial_state())) < 1e-15);

  CHECK_THROWS_AS(attach_environment(v), LayoutError);  // already has an environment
}

TEST_CASE("full decoherence relabels each branch to its own record") {
  const StateVector phi = apply_full_decoherence(attach_environment(initial_state()));
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(phi.amps[idx(0, 1, 1)] - Complex(r)) < 1e-15);
  CHECK(std::abs(phi.amps[idx(1, 0, 2)] - Complex(r)) < 1e-15);
  CHECK(std::abs(phi.amps[idx(0, 1, 0)]) == 0.0);
  CHECK(phi.norm_squared() == doctest::Approx(1.0).epsilon(1e-14));

  // Reduced two-particle operator: diagonal block only, coherences gone.
  const DensityOperator rho = reduced_two_particle(phi);
  for (std::size_t row = 0; row < 4; ++row) {
    for (std::size_t col = 0; col < 4; ++col) {
      const Complex expect = (row == col && (row == 1 || row == 2)) ? Complex(0.5) : Complex(0.0);
      CHECK(std::abs(rho.at(row, col) - expect) < 1e-15);
    }
  }
}

TEST_CASE("channels require the ready environment") {
  const StateVector phi = apply_full_decoherence(attach_environment(initial_state()));
  CHECK_THROWS_AS(apply_full_decoherence(phi), ValidationError);
  CHECK_THROWS_AS(apply_partial_decoherence(phi, PartialWhichPath::large_wavelength()),
                  ValidationError);
  CHECK_THROWS_AS(apply_full_decoherence(initial_state()), LayoutError);
}

TEST_CASE("partial decoherence produces the four-branch scattered state") {
  SplitMix64 rng(29);
  const StateVector ready = attach_environment(initial_state());
  for (int round = 0; round < 25; ++round) {
    const PartialWhichPath p = random_which_path(rng, round % 2 == 1);
    const StateVector out = apply_partial_decoherence(ready, p);
    CHECK(std::abs(out.amps[idx(0, 1, 1)] - p.near_amp) < 1e-15);
    CHECK(std::abs(out.amps[idx(0, 1, 2)] - p.far_amp) < 1e-15);
    CHECK(std::abs(out.amps[idx(1, 0, 2)] - p.near_amp) < 1e-15);
    CHECK(std::abs(out.amps[idx(1, 0, 1)] - p.far_amp) < 1e-15);
    CHECK(out.norm_squared() == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("perfect records reduce partial to full decoherence") {
  const StateVector ready = attach_environment(initial_state());
  const StateVector full = apply_full_decoherence(ready);
  const StateVector partial = apply_partial_decoherence(ready, PartialWhichPath::small_wavelength());
  for (std::size_t i = 0; i < 12; ++i) {
    CHECK(std::abs(full.amps[i] - partial.amps[i]) < 1e-15);
  }
}

TEST_CASE("uninformative records reduce the pair to the isolated density") {
  const StateVector ready = attach_environment(initial_state());
  const DensityOperator rho =
      reduced_two_particle(apply_partial_decoherence(ready, PartialWhichPath::large_wavelength()));
  CHECK(max_abs_diff(rho, dm_from_state(initial_state())) < 1e-12);
}

TEST_CASE("reduced density carries the diagonal and coherence coefficients") {
  SplitMix64 rng(31);
  const StateVector ready = attach_environment(initial_state());
  for (int round = 0; round < 25; ++round) {
    const PartialWhichPath p = random_which_path(rng, true);
    const DensityOperator rho = reduced_two_particle(apply_partial_decoherence(ready, p));
    const double diag = std::norm(p.near_amp) + std::norm(p.far_amp);  // always 1/2
    CHECK(std::abs(rho.at(1, 1) - Complex(diag)) < 1e-14);
    CHECK(std::abs(rho.at(2, 2) - Complex(diag)) < 1e-14);
    // n m* + n* m is real even for complex amplitudes.
    CHECK(std::abs(rho.at(1, 2) - Complex(p.coherence())) < 1e-14);
    CHECK(std::abs(rho.at(2, 1) - Complex(p.coherence())) < 1e-14);
    check_density_invariants(rho, "partial reduced");
  }
}

TEST_CASE("which-path amplitude validation") {
  CHECK_THROWS_AS(PartialWhichPath::make(0.8, 0.1), ValidationError);
  CHECK_THROWS_AS(PartialWhichPath::from_near_amplitude(0.9), ValidationError);
  CHECK_THROWS_AS(PartialWhichPath::from_near_amplitude(-0.1), ValidationError);
  const PartialWhichPath p = PartialWhichPath::from_near_amplitude(0.6);
  CHECK(std::norm(p.near_amp) + std::norm(p.far_amp) == doctest::Approx(0.5).epsilon(1e-14));
  PartialWhichPath::small_wavelength().validate();
  PartialWhichPath::large_wavelength().validate();
}

TEST_CASE("mixed density interpolates between the boundary operators") {
  const DensityOperator at_one = reduced_two_particle(mixed_density(IntensityMixture::make(1.0)));
  const DensityOperator at_zero = reduced_two_particle(mixed_density(IntensityMixture::make(0.0)));

  // Boundaries: fully recorded vs untouched pair.
  const StateVector ready = attach_environment(initial_state());
  CHECK(max_abs_diff(at_one, reduced_two_particle(apply_full_decoherence(ready))) < 1e-15);
  CHECK(max_abs_diff(at_zero, dm_from_state(initial_state())) < 1e-15);

  for (double w1 : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const DensityOperator rho = reduced_two_particle(mixed_density(IntensityMixture::make(w1)));
    const DensityOperator blend = mix(at_one, at_zero, w1);
    CHECK(max_abs_diff(rho, blend) < 1e-15);
    check_density_invariants(rho, "mixture");
  }

  // Coherence block scales linearly: at w1 = 0.5 it is half the isolated one.
  const DensityOperator half = reduced_two_particle(mixed_density(IntensityMixture::make(0.5)));
  CHECK(std::abs(half.at(1, 2) - Complex(0.25)) < 1e-15);

  CHECK_THROWS_AS(IntensityMixture::make(1.5), ValidationError);
  CHECK_THROWS_AS(IntensityMixture::make(-0.1), ValidationError);
}

TEST_CASE("two-sided scattering probability") {
  CHECK(two_sided_scatter_probability(0.1, 0.1) == 0.19);
  // Doubling holds to first order: |0.19 - 0.2| = 0.01 in exact arithmetic;
  // the slack only absorbs the binary representation of the decimals.
  CHECK(std::abs(0.19 - 2.0 * 0.1) <= 0.01 + 1e-15);
  CHECK(two_sided_scatter_probability(0.0, 0.37) == 0.37);
  CHECK(two_sided_scatter_probability(1.0, 0.42) == 1.0);
  CHECK_THROWS_AS(two_sided_scatter_probability(-0.1, 0.5), ValidationError);
  CHECK_THROWS_AS(two_sided_scatter_probability(0.5, 1.1), ValidationError);
}

TEST_CASE("every model reduces to an intensity mixture") {
  CHECK(as_mixture(Isolated{}).w1 == 0.0);
  CHECK(as_mixture(FullDecoherence{}).w1 == 1.0);
  CHECK_FALSE(as_mixture(FullDecoherence{}).which_path.has_value());
  CHECK(as_mixture(PartialWhichPath::large_wavelength()).w1 == 1.0);
  const IntensityMixture two = as_mixture(TwoSidedSources::make(0.1, 0.1));
  CHECK(two.w1 == 0.19);

  const DensityOperator iso = reduced_density(Isolated{});
  CHECK(max_abs_diff(iso, dm_from_state(initial_state())) < 1e-15);
}

TEST_CASE("property: channel pipeline outputs are valid density operators") {
  SplitMix64 rng(37);
  for (int round = 0; round < 30; ++round) {
    const EnvironmentModel model = [&]() -> EnvironmentModel {
      switch (round % 5) {
        case 0: return Isolated{};
        case 1: return FullDecoherence{};
        case 2: return random_which_path(rng, true);
        case 3: return IntensityMixture::make(rng.next_double(), random_which_path(rng, true));
        default:
          return TwoSidedSources::make(rng.next_double(), rng.next_double(),
                                       random_which_path(rng, false));
      }
    }();
    const DensityOperator full = mixed_density(as_mixture(model));
    check_density_invariants(full, "system-environment mixture");
    const DensityOperator reduced = reduced_density(model);
    check_density_invariants(reduced, "reduced pair density");
    CHECK(std::abs(trace(reduced) - 1.0) < 1e-12);
  }
}

}  // TEST_SUITE
