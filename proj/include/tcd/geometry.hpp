#pragma once

#include <vector>

#include "tcd/errors.hpp"
#include "tcd/linalg.hpp"

namespace tcd {

/**
 * Double-slit geometry shared by both arms of the interferometer.
 *
 * theta = d / (2 L), so the linearized slit-to-screen path lengths are
 * L - theta*y (slit 1) and L + theta*y (slit 2) and the two-slit path
 * difference recovers the standard d*y/L.  Slit 1 carries the minus sign;
 * swapping the convention only mirrors the fringe pattern.
 */
struct Geometry {
  double slit_separation = 0.0;  // d
  double screen_distance = 0.0;  // L
  double wavenumber = 0.0;       // k

  double theta() const { return slit_separation / (2.0 * screen_distance); }

  // d/L above 0.1 strains the far-field linearization; above 0.5 it is
  // rejected outright by make_geometry.
  bool far_field_strained() const { return slit_separation / screen_distance > 0.1; }
};

Geometry make_geometry(double slit_separation, double screen_distance, double wavenumber);
Geometry geometry_from_wavelength(double slit_separation, double screen_distance,
                                  double wavelength);

// Period of the coincidence fringes in ya - yb: the patterns go as
// cos(2 k theta (ya - yb)), so one full period is pi / (k theta).
double coincidence_fringe_period(const Geometry& g);

enum class AmplitudeMode {
  spherical,        // e^{ikr}/r with r the linearized path length
  fraunhofer_full,  // e^{ik(L -+ theta y)} / (L -+ theta y)
  fraunhofer_flat,  // e^{ik(L -+ theta y)}, unit modulus
};

// Linearized slit-to-screen distance; slit is 1 or 2.
double path_length(const Geometry& g, int slit, double y);

// Position-space amplitude <y|slit> in the requested mode.
Complex slit_amplitude(const Geometry& g, AmplitudeMode mode, int slit, double y);

/** Uniform detector coordinates, endpoints inclusive. */
struct ScreenGrid {
  double y_min = 0.0;
  double y_max = 0.0;
  std::size_t points = 0;

  double spacing() const { return (y_max - y_min) / static_cast<double>(points - 1); }
  std::vector<double> coordinates() const;
  double span() const { return y_max - y_min; }
};

ScreenGrid make_screen_grid(double y_min, double y_max, std::size_t points);

}  // namespace tcd
