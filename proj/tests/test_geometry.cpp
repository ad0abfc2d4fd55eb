#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tcd/geometry.hpp"
#include "tcd/rng.hpp"

using namespace tcd;

namespace {

Geometry default_geometry() {
  // L = 1 m, d = 10 um, lambda = 650 nm
  return geometry_from_wavelength(10e-6, 1.0, 650e-9);
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("theta is d over 2L") {
  const Geometry g = make_geometry(0.01, 1.0, 1.0);
  CHECK(g.theta() == doctest::Approx(0.005).epsilon(1e-15));
}

TEST_CASE("path lengths: on-axis, off-axis, mirror symmetry") {
  const Geometry g = make_geometry(0.01, 1.0, 1.0);
  CHECK(path_length(g, 1, 0.0) == 1.0);
  CHECK(path_length(g, 2, 0.0) == 1.0);
  CHECK(path_length(g, 2, 0.02) == doctest::Approx(1.0001).epsilon(1e-15));
  SplitMix64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const double y = rng.next_double(-0.1, 0.1);
    CHECK(path_length(g, 1, y) == path_length(g, 2, -y));
  }
  CHECK_THROWS_AS(path_length(g, 3, 0.0), ValidationError);
}

TEST_CASE("geometry validation") {
  CHECK_THROWS_AS(make_geometry(-1.0, 1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(make_geometry(0.01, 1.0, 0.0), ValidationError);
  CHECK_THROWS_AS(make_geometry(0.6, 1.0, 1.0), ValidationError);  // d/L beyond 0.5
  CHECK(make_geometry(0.2, 1.0, 1.0).far_field_strained());
  CHECK_FALSE(default_geometry().far_field_strained());
  CHECK_THROWS_AS(geometry_from_wavelength(0.01, 1.0, -650e-9), ValidationError);
}

TEST_CASE("flat amplitudes have unit modulus everywhere") {
  const Geometry g = default_geometry();
  SplitMix64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const double y = rng.next_double(-0.01, 0.01);
    for (int slit : {1, 2}) {
      CHECK(std::abs(std::abs(slit_amplitude(g, AmplitudeMode::fraunhofer_flat, slit, y)) - 1.0) <
            1e-15);
    }
  }
}

TEST_CASE("on-axis amplitudes") {
  const Geometry g = default_geometry();
  const Complex flat = slit_amplitude(g, AmplitudeMode::fraunhofer_flat, 1, 0.0);
  CHECK(std::abs(flat - std::polar(1.0, g.wavenumber * g.screen_distance)) < 1e-15);
  const Complex sph = slit_amplitude(g, AmplitudeMode::spherical, 2, 0.0);
  CHECK(std::abs(sph - std::polar(1.0, g.wavenumber * g.screen_distance) / g.screen_distance) <
        1e-15);
}

TEST_CASE("slit phase difference is -2 k theta y in every mode") {
  const Geometry g = default_geometry();
  SplitMix64 rng(7);
  for (AmplitudeMode mode : {AmplitudeMode::spherical, AmplitudeMode::fraunhofer_full,
                             AmplitudeMode::fraunhofer_flat}) {
    for (int i = 0; i < 100; ++i) {
      const double y = rng.next_double(-0.002, 0.002);
      const Complex a1 = slit_amplitude(g, mode, 1, y);
      const Complex a2 = slit_amplitude(g, mode, 2, y);
      const Complex phase = (a1 * std::conj(a2)) / (std::abs(a1) * std::abs(a2));
      const Complex expect = std::polar(1.0, -2.0 * g.wavenumber * g.theta() * y);
      CHECK(std::abs(phase - expect) < 1e-12);
    }
  }
}

TEST_CASE("spherical and full Fraunhofer amplitudes agree in the small-angle regime") {
  const Geometry g = default_geometry();
  SplitMix64 rng(11);
  const double y_limit = 1e-4 * g.screen_distance / g.theta();
  for (int i = 0; i < 200; ++i) {
    const double y = rng.next_double(-y_limit, y_limit);
    for (int slit : {1, 2}) {
      const Complex s = slit_amplitude(g, AmplitudeMode::spherical, slit, y);
      const Complex f = slit_amplitude(g, AmplitudeMode::fraunhofer_full, slit, y);
      CHECK(std::abs(s - f) <= 1e-6 * std::abs(f));
    }
  }
}

TEST_CASE("amplitude singularity guard") {
  const Geometry g = make_geometry(0.4, 1.0, 1.0);  // theta = 0.2
  CHECK_THROWS_AS(slit_amplitude(g, AmplitudeMode::spherical, 1, 5.0), SingularityError);
  CHECK_THROWS_AS(slit_amplitude(g, AmplitudeMode::fraunhofer_full, 1, 5.0), SingularityError);
  CHECK(std::abs(slit_amplitude(g, AmplitudeMode::fraunhofer_flat, 1, 5.0)) ==
        doctest::Approx(1.0));
}

TEST_CASE("grid coordinates") {
  CHECK(make_screen_grid(0.0, 1.0, 2).coordinates() == std::vector<double>{0.0, 1.0});
  CHECK(make_screen_grid(-1.0, 1.0, 3).coordinates() == std::vector<double>{-1.0, 0.0, 1.0});
  CHECK(make_screen_grid(0.0, 0.5, 6).spacing() == 0.1);
  const auto ys = make_screen_grid(-0.002, 0.002, 201).coordinates();
  REQUIRE(ys.size() == 201);
  CHECK(ys.front() == -0.002);
  CHECK(ys.back() == 0.002);
  for (std::size_t i = 1; i < ys.size(); ++i) CHECK(ys[i] > ys[i - 1]);
  CHECK_THROWS_AS(make_screen_grid(0.0, 1.0, 1), ValidationError);
  CHECK_THROWS_AS(make_screen_grid(1.0, 0.0, 5), ValidationError);
}

TEST_CASE("fringe period matches the closed-form argument") {
  const Geometry g = default_geometry();
  const double period = coincidence_fringe_period(g);
  CHECK(2.0 * g.wavenumber * g.theta() * period == doctest::Approx(2.0 * std::numbers::pi));
}

}  // TEST_SUITE
