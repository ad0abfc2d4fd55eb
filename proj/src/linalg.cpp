#include "tcd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace tcd {

namespace {

void require_finite(const std::vector<Complex>& xs, const char* what) {
  for (const Complex& x : xs) {
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) {
      throw ValidationError(std::string(what) + ": non-finite entry");
    }
  }
}

}  // namespace

HilbertLayout::HilbertLayout(std::vector<Factor> factors) : factors_(std::move(factors)) {
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (factors_[i].dim == 0) {
      throw LayoutError("factor '" + factors_[i].label + "' has dimension 0");
    }
    for (std::size_t j = i + 1; j < factors_.size(); ++j) {
      if (factors_[i].label == factors_[j].label) {
        throw LayoutError("duplicate factor label '" + factors_[i].label + "'");
      }
    }
  }
  strides_.assign(factors_.size(), 1);
  total_dim_ = 1;
  for (std::size_t i = factors_.size(); i-- > 0;) {
    strides_[i] = total_dim_;
    total_dim_ *= factors_[i].dim;
  }
}

bool HilbertLayout::has_label(std::string_view label) const {
  for (const Factor& f : factors_) {
    if (f.label == label) return true;
  }
  return false;
}

std::size_t HilbertLayout::index_of_label(std::string_view label) const {
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (factors_[i].label == label) return i;
  }
  throw LayoutError("unknown factor label '" + std::string(label) + "'");
}

std::size_t HilbertLayout::flat_index(const std::vector<std::size_t>& digits) const {
  if (digits.size() != factors_.size()) {
    throw LayoutError("digit tuple length does not match factor count");
  }
  std::size_t idx = 0;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (digits[i] >= factors_[i].dim) {
      throw LayoutError("digit out of range for factor '" + factors_[i].label + "'");
    }
    idx += digits[i] * strides_[i];
  }
  return idx;
}

HilbertLayout HilbertLayout::concat(const HilbertLayout& x, const HilbertLayout& y) {
  std::vector<Factor> fs = x.factors_;
  fs.insert(fs.end(), y.factors_.begin(), y.factors_.end());
  return HilbertLayout(std::move(fs));  // duplicate labels rejected here
}

double StateVector::norm_squared() const {
  double s = 0.0;
  for (const Complex& a : amps) s += std::norm(a);
  return s;
}

StateVector& StateVector::normalize() {
  const double n = std::sqrt(norm_squared());
  if (!(n > 1e-150)) throw ValidationError("cannot normalize a zero state vector");
  for (Complex& a : amps) a /= n;
  return *this;
}

StateVector make_state(HilbertLayout layout, std::vector<Complex> amps) {
  if (amps.size() != layout.total_dim()) {
    throw ValidationError("state vector length does not match layout dimension");
  }
  require_finite(amps, "state vector");
  return StateVector{std::move(layout), std::move(amps)};
}

DensityOperator make_density(HilbertLayout layout, std::vector<Complex> mat) {
  const std::size_t d = layout.total_dim();
  if (mat.size() != d * d) {
    throw ValidationError("density matrix size does not match layout dimension");
  }
  require_finite(mat, "density operator");
  return DensityOperator{std::move(layout), std::move(mat)};
}

StateVector basis_state(HilbertLayout layout, const std::vector<std::size_t>& digits) {
  std::vector<Complex> amps(layout.total_dim(), Complex(0.0, 0.0));
  amps[layout.flat_index(digits)] = Complex(1.0, 0.0);
  return StateVector{std::move(layout), std::move(amps)};
}

StateVector kron(const StateVector& x, const StateVector& y) {
  HilbertLayout layout = HilbertLayout::concat(x.layout, y.layout);
  const std::size_t ny = y.amps.size();
  std::vector<Complex> amps(x.amps.size() * ny);
  for (std::size_t i = 0; i < x.amps.size(); ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      amps[i * ny + j] = x.amps[i] * y.amps[j];
    }
  }
  return StateVector{std::move(layout), std::move(amps)};
}

DensityOperator kron(const DensityOperator& x, const DensityOperator& y) {
  HilbertLayout layout = HilbertLayout::concat(x.layout, y.layout);
  const std::size_t dx = x.dim(), dy = y.dim(), d = dx * dy;
  std::vector<Complex> mat(d * d);
  for (std::size_t i1 = 0; i1 < dx; ++i1) {
    for (std::size_t j1 = 0; j1 < dy; ++j1) {
      for (std::size_t i2 = 0; i2 < dx; ++i2) {
        for (std::size_t j2 = 0; j2 < dy; ++j2) {
          mat[(i1 * dy + j1) * d + (i2 * dy + j2)] = x.at(i1, i2) * y.at(j1, j2);
        }
      }
    }
  }
  return DensityOperator{std::move(layout), std::move(mat)};
}

DensityOperator dm_from_state(const StateVector& v) {
  const double n2 = v.norm_squared();
  if (std::abs(std::sqrt(n2) - 1.0) > tol::norm_input) {
    throw ValidationError("dm_from_state: input state is not normalized");
  }
  const std::size_t d = v.amps.size();
  std::vector<Complex> mat(d * d);
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      mat[r * d + c] = v.amps[r] * std::conj(v.amps[c]);
    }
  }
  return DensityOperator{v.layout, std::move(mat)};
}

DensityOperator partial_trace(const DensityOperator& rho, const std::vector<std::string>& keep) {
  if (keep.empty()) throw LayoutError("partial_trace: keep set is empty");
  const auto& fs = rho.layout.factors();
  std::vector<bool> is_kept(fs.size(), false);
  for (const std::string& label : keep) {
    is_kept[rho.layout.index_of_label(label)] = true;
  }

  std::vector<Factor> kept_factors;
  std::vector<std::size_t> kept_idx, traced_idx;
  for (std::size_t f = 0; f < fs.size(); ++f) {
    if (is_kept[f]) {
      kept_idx.push_back(f);
      kept_factors.push_back(fs[f]);
    } else {
      traced_idx.push_back(f);
    }
  }

  HilbertLayout out_layout{std::move(kept_factors)};
  const std::size_t out_dim = out_layout.total_dim();
  std::size_t traced_dim = 1;
  for (std::size_t f : traced_idx) traced_dim *= fs[f].dim;

  // Offset tables: flat sub-index over a factor subset -> offset in the full space.
  auto offset_table = [&](const std::vector<std::size_t>& subset, std::size_t sub_dim) {
    std::vector<std::size_t> table(sub_dim, 0);
    for (std::size_t s = 0; s < sub_dim; ++s) {
      std::size_t rem = s, off = 0;
      for (std::size_t i = subset.size(); i-- > 0;) {
        const std::size_t f = subset[i];
        off += (rem % fs[f].dim) * rho.layout.stride(f);
        rem /= fs[f].dim;
      }
      table[s] = off;
    }
    return table;
  };
  const std::vector<std::size_t> kept_off = offset_table(kept_idx, out_dim);
  const std::vector<std::size_t> traced_off = offset_table(traced_idx, traced_dim);

  const std::size_t d = rho.dim();
  std::vector<Complex> mat(out_dim * out_dim);
  for (std::size_t r = 0; r < out_dim; ++r) {
    for (std::size_t c = 0; c < out_dim; ++c) {
      Complex s(0.0, 0.0);
      for (std::size_t t = 0; t < traced_dim; ++t) {
        s += rho.mat[(kept_off[r] + traced_off[t]) * d + (kept_off[c] + traced_off[t])];
      }
      mat[r * out_dim + c] = s;
    }
  }
  return DensityOperator{std::move(out_layout), std::move(mat)};
}

double trace(const DensityOperator& rho) {
  Complex t(0.0, 0.0);
  for (std::size_t i = 0; i < rho.dim(); ++i) t += rho.at(i, i);
  if (std::abs(t.imag()) > tol::trace_residual) {
    throw ValidationError("trace: imaginary residue exceeds tolerance");
  }
  return t.real();
}

double purity(const DensityOperator& rho) {
  const std::size_t d = rho.dim();
  Complex p(0.0, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      p += rho.at(i, j) * rho.at(j, i);
    }
  }
  if (std::abs(p.imag()) > tol::trace_residual) {
    throw ValidationError("purity: imaginary residue exceeds tolerance");
  }
  return p.real();
}

DensityOperator mix(const DensityOperator& x, const DensityOperator& y, double w) {
  if (!(w >= 0.0 && w <= 1.0)) throw ValidationError("mix: weight outside [0, 1]");
  if (!(x.layout == y.layout)) throw LayoutError("mix: layouts differ");
  std::vector<Complex> mat(x.mat.size());
  for (std::size_t i = 0; i < mat.size(); ++i) {
    mat[i] = w * x.mat[i] + (1.0 - w) * y.mat[i];
  }
  return DensityOperator{x.layout, std::move(mat)};
}

double hermiticity_defect(const DensityOperator& rho) {
  double worst = 0.0;
  for (std::size_t r = 0; r < rho.dim(); ++r) {
    for (std::size_t c = 0; c <= r; ++c) {
      worst = std::max(worst, std::abs(rho.at(r, c) - std::conj(rho.at(c, r))));
    }
  }
  return worst;
}

std::vector<double> eig_hermitian(std::vector<Complex> a, std::size_t n) {
  if (a.size() != n * n) throw ValidationError("eig_hermitian: size mismatch");

  double defect = 0.0, frob = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      defect = std::max(defect, std::abs(a[r * n + c] - std::conj(a[c * n + r])));
      frob += std::norm(a[r * n + c]);
    }
  }
  frob = std::sqrt(frob);
  if (defect > tol::hermitian_input) {
    throw ValidationError("eig_hermitian: matrix is not Hermitian within tolerance");
  }
  // Work on the Hermitian part so tiny asymmetries cannot bias the rotations.
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = r + 1; c < n; ++c) {
      const Complex h = 0.5 * (a[r * n + c] + std::conj(a[c * n + r]));
      a[r * n + c] = h;
      a[c * n + r] = std::conj(h);
    }
    a[r * n + r] = Complex(a[r * n + r].real(), 0.0);
  }

  const double threshold = tol::jacobi_off * std::max(1.0, frob);
  bool converged = false;
  for (int sweep = 0; sweep < 60 && !converged; ++sweep) {
    double off2 = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off2 += 2.0 * std::norm(a[p * n + q]);
    }
    if (std::sqrt(off2) <= threshold) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a[p * n + q];
        const double r = std::abs(apq);
        if (r < 1e-300) {
          a[p * n + q] = a[q * n + p] = Complex(0.0, 0.0);
          continue;
        }
        const double app = a[p * n + p].real();
        const double aqq = a[q * n + q].real();
        // Unitary 2x2 rotation U = [[c, sigma], [-conj(sigma), c]] with
        // sigma = s * apq/|apq| chosen to zero the (p,q) entry.
        const double tau = (aqq - app) / (2.0 * r);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const Complex sigma = s * (apq / r);

        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const Complex akp = a[k * n + p];
          const Complex akq = a[k * n + q];
          a[k * n + p] = c * akp - std::conj(sigma) * akq;
          a[k * n + q] = sigma * akp + c * akq;
          a[p * n + k] = std::conj(a[k * n + p]);
          a[q * n + k] = std::conj(a[k * n + q]);
        }
        a[p * n + p] = Complex(c * c * app - 2.0 * c * s * r + s * s * aqq, 0.0);
        a[q * n + q] = Complex(s * s * app + 2.0 * c * s * r + c * c * aqq, 0.0);
        a[p * n + q] = a[q * n + p] = Complex(0.0, 0.0);
      }
    }
  }
  if (!converged) throw NumericError("eig_hermitian: Jacobi sweep limit reached");

  std::vector<double> eigs(n);
  for (std::size_t i = 0; i < n; ++i) eigs[i] = a[i * n + i].real();
  std::sort(eigs.begin(), eigs.end());
  return eigs;
}

std::vector<double> eig_hermitian(const DensityOperator& rho) {
  return eig_hermitian(rho.mat, rho.dim());
}

void check_density_invariants(const DensityOperator& rho, std::string_view context) {
  const std::string where(context);
  if (hermiticity_defect(rho) > tol::hermitian) {
    throw ValidationError(where + ": density operator not Hermitian");
  }
  if (std::abs(trace(rho) - 1.0) > tol::trace_residual) {
    throw ValidationError(where + ": density operator trace differs from 1");
  }
  const std::vector<double> eigs = eig_hermitian(rho);
  if (eigs.front() < tol::min_eigenvalue) {
    throw ValidationError(where + ": density operator has a negative eigenvalue");
  }
}

double max_abs_diff(const DensityOperator& x, const DensityOperator& y) {
  if (!(x.layout == y.layout)) throw LayoutError("max_abs_diff: layouts differ");
  double worst = 0.0;
  for (std::size_t i = 0; i < x.mat.size(); ++i) {
    worst = std::max(worst, std::abs(x.mat[i] - y.mat[i]));
  }
  return worst;
}

}  // namespace tcd
