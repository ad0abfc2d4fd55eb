#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "tcd/errors.hpp"

namespace tcd {

using Complex = std::complex<double>;

// Tolerances shared by the state/operator invariants.
namespace tol {
inline constexpr double norm_residual = 1e-12;    // |norm - 1| after normalization
inline constexpr double norm_input = 1e-9;        // dm_from_state precondition
inline constexpr double hermitian = 1e-12;        // max-entry deviation from M^dagger
inline constexpr double hermitian_input = 1e-8;   // eig_hermitian precondition
inline constexpr double trace_residual = 1e-12;
inline constexpr double min_eigenvalue = -1e-10;  // PSD slack for round-off
inline constexpr double jacobi_off = 1e-14;       // off-diagonal norm at convergence
}  // namespace tol

struct Factor {
  std::string label;
  std::size_t dim = 0;

  bool operator==(const Factor&) const = default;
};

/**
 * Ordered list of tensor factors with unique labels.
 *
 * Flat indices are mixed-radix over the factor dimensions with the LAST
 * factor varying fastest: on [a-slit:2, b-slit:2, env:3] the digit tuple
 * (i, j, e) maps to i*6 + j*3 + e.  Keeping one fixed convention for all
 * index arithmetic is what makes kron and partial_trace composable.
 */
class HilbertLayout {
 public:
  HilbertLayout() = default;
  explicit HilbertLayout(std::vector<Factor> factors);

  const std::vector<Factor>& factors() const { return factors_; }
  std::size_t factor_count() const { return factors_.size(); }
  std::size_t total_dim() const { return total_dim_; }
  std::size_t dim_of(std::size_t factor) const { return factors_[factor].dim; }

  // Stride of a factor: product of the dims of all later factors.
  std::size_t stride(std::size_t factor) const { return strides_[factor]; }

  bool has_label(std::string_view label) const;
  std::size_t index_of_label(std::string_view label) const;  // LayoutError if unknown

  std::size_t flat_index(const std::vector<std::size_t>& digits) const;

  // Layout of a tensor product; LayoutError on duplicate labels.
  static HilbertLayout concat(const HilbertLayout& x, const HilbertLayout& y);

  bool operator==(const HilbertLayout& other) const { return factors_ == other.factors_; }

 private:
  std::vector<Factor> factors_;
  std::vector<std::size_t> strides_;
  std::size_t total_dim_ = 1;
};

// Canonical factor labels used throughout the interferometer model.
namespace labels {
inline constexpr const char* a_slit = "a-slit";
inline constexpr const char* b_slit = "b-slit";
inline constexpr const char* env = "env";
}  // namespace labels

/** Pure state over a labeled tensor-product space. */
struct StateVector {
  HilbertLayout layout;
  std::vector<Complex> amps;

  double norm_squared() const;
  StateVector& normalize();  // ValidationError on (near-)zero vector
};

/** Density operator, dense row-major dim x dim. */
struct DensityOperator {
  HilbertLayout layout;
  std::vector<Complex> mat;

  std::size_t dim() const { return layout.total_dim(); }
  Complex& at(std::size_t r, std::size_t c) { return mat[r * dim() + c]; }
  const Complex& at(std::size_t r, std::size_t c) const { return mat[r * dim() + c]; }
};

// Checked constructors: size match and finite entries (ValidationError).
StateVector make_state(HilbertLayout layout, std::vector<Complex> amps);
DensityOperator make_density(HilbertLayout layout, std::vector<Complex> mat);

// Basis vector |digits> on the given layout.
StateVector basis_state(HilbertLayout layout, const std::vector<std::size_t>& digits);

// Tensor products; amplitudes/entries multiply in row-major factor order.
StateVector kron(const StateVector& x, const StateVector& y);
DensityOperator kron(const DensityOperator& x, const DensityOperator& y);

// rho = |v><v|.  Input must be normalized within tol::norm_input.
DensityOperator dm_from_state(const StateVector& v);

// Trace out every factor NOT in `keep`; kept factors stay in original order.
DensityOperator partial_trace(const DensityOperator& rho, const std::vector<std::string>& keep);

double trace(const DensityOperator& rho);   // validates imaginary residue
double purity(const DensityOperator& rho);  // Tr(rho^2)

// Convex combination w*x + (1-w)*y of operators on the same layout.
DensityOperator mix(const DensityOperator& x, const DensityOperator& y, double w);

/**
 * Ascending eigenvalues of the Hermitian part, computed with cyclic complex
 * Jacobi rotations.  Meant for the small matrices of this artifact
 * (dim <= 16); ValidationError when the input deviates from Hermitian by
 * more than tol::hermitian_input.
 */
std::vector<double> eig_hermitian(const DensityOperator& rho);
std::vector<double> eig_hermitian(std::vector<Complex> mat, std::size_t n);

// Hermiticity, unit trace and positivity checks; ValidationError on failure.
void check_density_invariants(const DensityOperator& rho, std::string_view context);

double max_abs_diff(const DensityOperator& x, const DensityOperator& y);
double hermiticity_defect(const DensityOperator& rho);  // max |M - M^dagger| entry

}  // namespace tcd
