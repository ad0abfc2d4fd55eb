#include "tcd/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace tcd {

Geometry make_geometry(double slit_separation, double screen_distance, double wavenumber) {
  if (!(slit_separation > 0.0) || !(screen_distance > 0.0) || !(wavenumber > 0.0)) {
    throw ValidationError("geometry: d, L and k must all be positive");
  }
  if (slit_separation / screen_distance > 0.5) {
    throw ValidationError("geometry: d/L = " +
                          std::to_string(slit_separation / screen_distance) +
                          " is far outside the far-field regime (limit 0.5)");
  }
  return Geometry{slit_separation, screen_distance, wavenumber};
}

Geometry geometry_from_wavelength(double slit_separation, double screen_distance,
                                  double wavelength) {
  if (!(wavelength > 0.0)) throw ValidationError("geometry: wavelength must be positive");
  return make_geometry(slit_separation, screen_distance, 2.0 * std::numbers::pi / wavelength);
}

double coincidence_fringe_period(const Geometry& g) {
  return std::numbers::pi / (g.wavenumber * g.theta());
}

double path_length(const Geometry& g, int slit, double y) {
  if (slit != 1 && slit != 2) throw ValidationError("slit index must be 1 or 2");
  const double shift = g.theta() * y;
  return slit == 1 ? g.screen_distance - shift : g.screen_distance + shift;
}

Complex slit_amplitude(const Geometry& g, AmplitudeMode mode, int slit, double y) {
  if (slit != 1 && slit != 2) throw ValidationError("slit index must be 1 or 2");
  // e^{ik(L -+ theta y)} evaluated as e^{ikL} * e^{-+ ik theta y}.  kL is of
  // order 1e7 rad for optical parameters; keeping it as one shared factor
  // lets it cancel exactly in every |...|^2 product, so relative fringe
  // phases stay accurate to machine precision instead of ~kL*eps.
  const double relative = g.wavenumber * g.theta() * y;
  const Complex phase = std::polar(1.0, g.wavenumber * g.screen_distance) *
                        std::polar(1.0, slit == 1 ? -relative : relative);
  switch (mode) {
    case AmplitudeMode::spherical: {
      const double r = path_length(g, slit, y);
      if (std::abs(r) < 1e-9 * g.screen_distance) {
        throw SingularityError("slit_amplitude: detection point too close to a slit axis zero");
      }
      return phase / r;
    }
    case AmplitudeMode::fraunhofer_full: {
      const double denom = slit == 1 ? g.screen_distance - g.theta() * y
                                     : g.screen_distance + g.theta() * y;
      if (std::abs(denom) < 1e-9 * g.screen_distance) {
        throw SingularityError("slit_amplitude: vanishing Fraunhofer denominator");
      }
      return phase / denom;
    }
    case AmplitudeMode::fraunhofer_flat:
      return phase;
  }
  throw ValidationError("slit_amplitude: unknown mode");
}

std::vector<double> ScreenGrid::coordinates() const {
  std::vector<double> ys(points);
  const double h = spacing();
  for (std::size_t i = 0; i < points; ++i) {
    ys[i] = y_min + static_cast<double>(i) * h;
  }
  ys.back() = y_max;  // inclusive endpoint, immune to rounding drift
  return ys;
}

ScreenGrid make_screen_grid(double y_min, double y_max, std::size_t points) {
  if (points < 2) throw ValidationError("screen grid needs at least 2 points");
  if (!(y_min < y_max)) throw ValidationError("screen grid range is empty");
  if (!std::isfinite(y_min) || !std::isfinite(y_max)) {
    throw ValidationError("screen grid bounds must be finite");
  }
  return ScreenGrid{y_min, y_max, points};
}

}  // namespace tcd
