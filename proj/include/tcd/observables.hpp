#pragma once

#include <functional>
#include <vector>

#include "tcd/channels.hpp"
#include "tcd/geometry.hpp"
#include "tcd/linalg.hpp"

namespace tcd {

enum class Normalization { raw, unit_sum };

struct DensityMap1D {
  ScreenGrid grid;
  std::vector<double> values;
  Normalization normalization = Normalization::raw;
};

/** Coincidence density sampled on grid_a x grid_b, row-major in ya then yb. */
struct DensityMap2D {
  ScreenGrid grid_a;
  ScreenGrid grid_b;
  std::vector<double> values;
  Normalization normalization = Normalization::raw;

  double at(std::size_t ia, std::size_t ib) const { return values[ia * grid_b.points + ib]; }
};

// <y|rho_a|y> for a single-particle operator (one dim-2 factor).
DensityMap1D single_particle_density(const DensityOperator& rho_a, const Geometry& g,
                                     AmplitudeMode mode, const ScreenGrid& grid);

// <yb|<ya|rho_ab|ya>|yb> for a two-particle operator (two dim-2 factors;
// factor 0 is read on grid_a, factor 1 on grid_b).
DensityMap2D joint_density(const DensityOperator& rho_ab, const Geometry& g, AmplitudeMode mode,
                           const ScreenGrid& grid_a, const ScreenGrid& grid_b);

// Same quadratic form on explicit coordinate lists / a single pair.
std::vector<double> joint_density_values(const DensityOperator& rho_ab, const Geometry& g,
                                         AmplitudeMode mode, const std::vector<double>& ya,
                                         const std::vector<double>& yb);
double joint_density_at(const DensityOperator& rho_ab, const Geometry& g, AmplitudeMode mode,
                        double ya, double yb);

// Closed-form coincidence profiles in dy = ya - yb, unnormalized ("equal up
// to a constant factor" convention), valid in the flat Fraunhofer mode.
double closed_form_isolated(const Geometry& g, double dy);          // cos^2(k theta dy)
double closed_form_full_decoherence(const Geometry& g, double dy);  // constant 1
double closed_form_partial(const Geometry& g, const PartialWhichPath& p, double dy);
double closed_form_mixture(const Geometry& g, double w1, double dy);

/**
 * Flat-mode fringe contrast kappa of a model: its coincidence profile is
 * proportional to 1 + kappa cos(2 k theta dy), so the expected visibility
 * is |kappa|.  Isolated: 1.  Perfect records: 0.  Partial records:
 * 2 (n m* + n* m).  Intensity mixtures compose affinely in w1.
 */
double fringe_contrast(const EnvironmentModel& model);

// Model-dispatched profile (1 + kappa cos(2 k theta dy)) / 2; one global
// scale away from the literal closed forms above.
std::function<double(double)> closed_form_profile(const EnvironmentModel& model,
                                                  const Geometry& g);

enum class VisibilityMethod { minmax, fourier };

struct VisibilityReport {
  double v = 0.0;
  double max_density = 0.0;
  double min_density = 0.0;
  VisibilityMethod method = VisibilityMethod::fourier;
};

/**
 * Least-squares projection of samples onto {1, cos(omega x), sin(omega x)}.
 * Solved by modified Gram-Schmidt QR with reorthogonalization, so the fit
 * stays accurate even when the grid spans a small fraction of a period and
 * the cosine column is nearly constant.
 */
struct FringeFit {
  double mean = 0.0;
  double cos_coef = 0.0;
  double sin_coef = 0.0;

  double amplitude() const { return std::sqrt(cos_coef * cos_coef + sin_coef * sin_coef); }
};

FringeFit fit_fringe(const std::vector<double>& x, const std::vector<double>& values,
                     double omega);

// Fringe visibility of a coincidence map.  minmax needs the map to span at
// least one full period in dy (InsufficientSpanError otherwise); fourier
// reads the fringe amplitude at spatial frequency 2 k theta off a
// least-squares fit and tolerates slowly varying envelopes.
VisibilityReport visibility(const DensityMap2D& map, const Geometry& g, VisibilityMethod method);

// Scale values to unit sum (fixed-order compensated summation).
DensityMap1D normalize(DensityMap1D map);
DensityMap2D normalize(DensityMap2D map);

// Scale s minimizing ||target - s * reference||.
double least_squares_scale(const std::vector<double>& target,
                           const std::vector<double>& reference);

}  // namespace tcd
