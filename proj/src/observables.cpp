#include "tcd/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tcd/numeric.hpp"

namespace tcd {

namespace {

// Evaluated quadratic forms are real up to round-off; anything bigger than
// this residue (relative to the value scale) indicates a non-Hermitian input.
constexpr double kImagResidue = 1e-12;
// Small negative values are round-off and get clipped to zero; beyond
// -1e-9 * scale the input operator was not positive.
constexpr double kNegativeHard = 1e-9;

double to_real_density(const Complex& v, double scale) {
  if (std::abs(v.imag()) > kImagResidue * scale) {
    throw NumericError("density evaluation: imaginary residue exceeds tolerance");
  }
  const double re = v.real();
  if (re < -kNegativeHard * scale) {
    throw NumericError("density evaluation: negative value beyond round-off");
  }
  return re < 0.0 ? 0.0 : re;
}

void require_two_slit_factor(const DensityOperator& rho) {
  if (rho.layout.factor_count() != 1 || rho.layout.dim_of(0) != 2) {
    throw LayoutError("single_particle_density: expected one dim-2 factor");
  }
}

void require_pair_factors(const DensityOperator& rho) {
  if (rho.layout.factor_count() != 2 || rho.layout.dim_of(0) != 2 || rho.layout.dim_of(1) != 2) {
    throw LayoutError("joint_density: expected two dim-2 factors");
  }
}

struct AmplitudeTable {
  std::vector<Complex> slit1, slit2;
};

AmplitudeTable tabulate(const Geometry& g, AmplitudeMode mode, const std::vector<double>& ys) {
  AmplitudeTable t;
  t.slit1.reserve(ys.size());
  t.slit2.reserve(ys.size());
  for (double y : ys) {
    t.slit1.push_back(slit_amplitude(g, mode, 1, y));
    t.slit2.push_back(slit_amplitude(g, mode, 2, y));
  }
  return t;
}

}  // namespace

DensityMap1D single_particle_density(const DensityOperator& rho_a, const Geometry& g,
                                     AmplitudeMode mode, const ScreenGrid& grid) {
  require_two_slit_factor(rho_a);
  const std::vector<double> ys = grid.coordinates();
  const AmplitudeTable amp = tabulate(g, mode, ys);

  std::vector<double> values(ys.size());
  std::vector<Complex> raw(ys.size());
  double scale = 1.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const Complex psi[2] = {amp.slit1[i], amp.slit2[i]};
    Complex v(0.0, 0.0);
    for (std::size_t r = 0; r < 2; ++r) {
      for (std::size_t c = 0; c < 2; ++c) {
        v += rho_a.at(r, c) * psi[r] * std::conj(psi[c]);
      }
    }
    raw[i] = v;
    scale = std::max(scale, std::abs(v));
  }
  for (std::size_t i = 0; i < ys.size(); ++i) values[i] = to_real_density(raw[i], scale);
  return DensityMap1D{grid, std::move(values), Normalization::raw};
}

std::vector<double> joint_density_values(const DensityOperator& rho_ab, const Geometry& g,
                                         AmplitudeMode mode, const std::vector<double>& ya,
                                         const std::vector<double>& yb) {
  require_pair_factors(rho_ab);
  const AmplitudeTable amp_a = tabulate(g, mode, ya);
  const AmplitudeTable amp_b = tabulate(g, mode, yb);

  std::vector<Complex> raw(ya.size() * yb.size());
  double scale = 1.0;
  for (std::size_t i = 0; i < ya.size(); ++i) {
    const Complex pa[2] = {amp_a.slit1[i], amp_a.slit2[i]};
    for (std::size_t j = 0; j < yb.size(); ++j) {
      const Complex pb[2] = {amp_b.slit1[j], amp_b.slit2[j]};
      // phi[(slit_a, slit_b)] = <ya|R_i><yb|L_j> on the flat pair index.
      const Complex phi[4] = {pa[0] * pb[0], pa[0] * pb[1], pa[1] * pb[0], pa[1] * pb[1]};
      Complex v(0.0, 0.0);
      for (std::size_t r = 0; r < 4; ++r) {
        Complex row(0.0, 0.0);
        for (std::size_t c = 0; c < 4; ++c) row += rho_ab.at(r, c) * std::conj(phi[c]);
        v += phi[r] * row;
      }
      raw[i * yb.size() + j] = v;
      scale = std::max(scale, std::abs(v));
    }
  }
  std::vector<double> values(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) values[k] = to_real_density(raw[k], scale);
  return values;
}

DensityMap2D joint_density(const DensityOperator& rho_ab, const Geometry& g, AmplitudeMode mode,
                           const ScreenGrid& grid_a, const ScreenGrid& grid_b) {
  std::vector<double> values =
      joint_density_values(rho_ab, g, mode, grid_a.coordinates(), grid_b.coordinates());
  return DensityMap2D{grid_a, grid_b, std::move(values), Normalization::raw};
}

double joint_density_at(const DensityOperator& rho_ab, const Geometry& g, AmplitudeMode mode,
                        double ya, double yb) {
  return joint_density_values(rho_ab, g, mode, {ya}, {yb})[0];
}

double closed_form_isolated(const Geometry& g, double dy) {
  const double c = std::cos(g.wavenumber * g.theta() * dy);
  return c * c;
}

double closed_form_full_decoherence(const Geometry&, double) { return 1.0; }

double closed_form_partial(const Geometry& g, const PartialWhichPath& p, double dy) {
  p.validate();
  const double diag = std::norm(p.near_amp) + std::norm(p.far_amp);
  return diag + p.coherence() * std::cos(2.0 * g.wavenumber * g.theta() * dy);
}

double closed_form_mixture(const Geometry& g, double w1, double dy) {
  if (!(w1 >= 0.0 && w1 <= 1.0)) throw ValidationError("w1 must lie in [0, 1]");
  return w1 + 2.0 * (1.0 - w1) * closed_form_isolated(g, dy);
}

double fringe_contrast(const EnvironmentModel& model) {
  const IntensityMixture m = as_mixture(model);
  const double scattered = m.which_path ? 2.0 * m.which_path->coherence() : 0.0;
  return m.w1 * scattered + m.w2();
}

std::function<double(double)> closed_form_profile(const EnvironmentModel& model,
                                                  const Geometry& g) {
  const double kappa = fringe_contrast(model);
  const double omega = 2.0 * g.wavenumber * g.theta();
  return [kappa, omega](double dy) { return 0.5 * (1.0 + kappa * std::cos(omega * dy)); };
}

FringeFit fit_fringe(const std::vector<double>& x, const std::vector<double>& values,
                     double omega) {
  const std::size_t n = x.size();
  if (values.size() != n || n < 3) {
    throw ValidationError("fit_fringe: need matching x/value lists with at least 3 samples");
  }

  std::vector<std::vector<double>> cols(3, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    cols[0][i] = 1.0;
    cols[1][i] = std::cos(omega * x[i]);
    cols[2][i] = std::sin(omega * x[i]);
  }

  // Thin QR by modified Gram-Schmidt, reorthogonalized once.
  double r_diag[3];
  double r_upper[3][3] = {};
  std::vector<std::vector<double>> q = cols;
  for (std::size_t k = 0; k < 3; ++k) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < k; ++j) {
        const double proj = compensated_dot(q[j], q[k]);
        for (std::size_t i = 0; i < n; ++i) q[k][i] -= proj * q[j][i];
      }
    }
    r_diag[k] = std::sqrt(compensated_dot(q[k], q[k]));
    if (!(r_diag[k] > 1e-10 * std::sqrt(static_cast<double>(n)))) {
      throw InsufficientSpanError("fit_fringe: fringe basis is degenerate on this grid");
    }
    for (std::size_t i = 0; i < n; ++i) q[k][i] /= r_diag[k];
  }
  // Strictly upper entries of R = Q^T A against the final orthonormal Q.
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t k = j + 1; k < 3; ++k) {
      r_upper[j][k] = compensated_dot(q[j], cols[k]);
    }
  }

  const double z0 = compensated_dot(q[0], values);
  const double z1 = compensated_dot(q[1], values);
  const double z2 = compensated_dot(q[2], values);

  FringeFit fit;
  fit.sin_coef = z2 / r_diag[2];
  fit.cos_coef = (z1 - r_upper[1][2] * fit.sin_coef) / r_diag[1];
  fit.mean = (z0 - r_upper[0][1] * fit.cos_coef - r_upper[0][2] * fit.sin_coef) / r_diag[0];
  return fit;
}

VisibilityReport visibility(const DensityMap2D& map, const Geometry& g, VisibilityMethod method) {
  if (map.values.empty()) throw ValidationError("visibility: empty map");
  const auto [lo, hi] = std::minmax_element(map.values.begin(), map.values.end());
  VisibilityReport report;
  report.max_density = *hi;
  report.min_density = *lo;
  report.method = method;

  if (method == VisibilityMethod::minmax) {
    const double dy_span = map.grid_a.span() + map.grid_b.span();
    if (dy_span < coincidence_fringe_period(g)) {
      throw InsufficientSpanError(
          "visibility(minmax): map spans less than one fringe period in ya - yb");
    }
    const double denom = report.max_density + report.min_density;
    if (!(denom > 0.0)) throw ValidationError("visibility: all-zero map");
    report.v = (report.max_density - report.min_density) / denom;
    return report;
  }

  const std::vector<double> ya = map.grid_a.coordinates();
  const std::vector<double> yb = map.grid_b.coordinates();
  std::vector<double> dy(map.values.size());
  for (std::size_t i = 0; i < ya.size(); ++i) {
    for (std::size_t j = 0; j < yb.size(); ++j) dy[i * yb.size() + j] = ya[i] - yb[j];
  }
  const FringeFit fit = fit_fringe(dy, map.values, 2.0 * g.wavenumber * g.theta());
  if (!(fit.mean > 0.0)) throw ValidationError("visibility: non-positive mean density");
  report.v = fit.amplitude() / fit.mean;
  return report;
}

namespace {

std::vector<double> unit_sum(std::vector<double> values) {
  const double total = compensated_total(values);
  if (!(total > 0.0)) throw ValidationError("normalize: map sums to zero");
  for (double& v : values) v /= total;
  return values;
}

}  // namespace

DensityMap1D normalize(DensityMap1D map) {
  if (map.normalization == Normalization::unit_sum) return map;  // idempotent
  map.values = unit_sum(std::move(map.values));
  map.normalization = Normalization::unit_sum;
  return map;
}

DensityMap2D normalize(DensityMap2D map) {
  if (map.normalization == Normalization::unit_sum) return map;
  map.values = unit_sum(std::move(map.values));
  map.normalization = Normalization::unit_sum;
  return map;
}

double least_squares_scale(const std::vector<double>& target,
                           const std::vector<double>& reference) {
  if (target.size() != reference.size() || target.empty()) {
    throw ValidationError("least_squares_scale: size mismatch");
  }
  const double rr = compensated_dot(reference, reference);
  if (!(rr > 0.0)) throw ValidationError("least_squares_scale: zero reference");
  return compensated_dot(target, reference) / rr;
}

}  // namespace tcd
