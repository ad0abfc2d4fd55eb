#pragma once

#include <optional>
#include <variant>

#include "tcd/linalg.hpp"

namespace tcd {

/**
 * Which-path record amplitudes for a photon scattered near a slit: n for
 * the detector nearer to that slit, m for the farther one.  The scattered
 * four-branch state is normalized exactly when |n|^2 + |m|^2 = 1/2.
 */
struct PartialWhichPath {
  Complex near_amp;  // n
  Complex far_amp;   // m

  void validate() const;  // ValidationError unless |n|^2 + |m|^2 = 1/2

  // n m* + n* m: the (real) weight of the coherence block in the reduced
  // two-particle density.
  double coherence() const { return 2.0 * (near_amp * std::conj(far_amp)).real(); }

  static PartialWhichPath make(Complex n, Complex m);
  // Real n in [0, 1/sqrt 2]; m = sqrt(1/2 - n^2).
  static PartialWhichPath from_near_amplitude(double n);
  static PartialWhichPath small_wavelength();  // (1/sqrt 2, 0): perfect records
  static PartialWhichPath large_wavelength();  // (1/2, 1/2): no path information
};

/**
 * Classical scattering mixture: with probability w1 particle a scatters a
 * photon (records described by which_path; nullopt means perfect records),
 * with probability w2 = 1 - w1 nothing scatters.
 */
struct IntensityMixture {
  double w1 = 1.0;
  std::optional<PartialWhichPath> which_path;

  double w2() const { return 1.0 - w1; }
  void validate() const;

  static IntensityMixture make(double w1, std::optional<PartialWhichPath> which_path = {});
};

struct Isolated {};
struct FullDecoherence {};

/** Light sources behind both slit screens, per-particle scatter odds p_a, p_b. */
struct TwoSidedSources {
  double p_a = 0.0;
  double p_b = 0.0;
  std::optional<PartialWhichPath> which_path;

  void validate() const;
  static TwoSidedSources make(double p_a, double p_b,
                              std::optional<PartialWhichPath> which_path = {});
};

using EnvironmentModel =
    std::variant<Isolated, FullDecoherence, PartialWhichPath, IntensityMixture, TwoSidedSources>;

void validate_model(const EnvironmentModel& model);

// Canonical layouts: [a-slit:2, b-slit:2] and [a-slit:2, b-slit:2, env:3].
HilbertLayout two_particle_layout();
HilbertLayout system_env_layout();

// 1/sqrt(2) (|R1>|L2> + |R2>|L1>): the momentum-anticorrelated pair.
StateVector initial_state();

// Join a two-particle state with the ready-state environment |e0>.
StateVector attach_environment(const StateVector& v);

// Perfect record channel: the |R1 L2| branch flips the environment to |e1>,
// the |R2 L1| branch to |e2>; other slit pairs keep |e0>.  Requires the
// input environment to be |e0>.
StateVector apply_full_decoherence(const StateVector& v);

// Partial record channel: each anticorrelated branch splits between the
// nearer (n) and farther (m) detector records.  With (n, m) = (1/sqrt 2, 0)
// this coincides with apply_full_decoherence.
StateVector apply_partial_decoherence(const StateVector& v, const PartialWhichPath& p);

// Trace over the environment only, leaving the two-particle operator.
DensityOperator reduced_two_particle(const StateVector& v);
DensityOperator reduced_two_particle(const DensityOperator& rho);

// w1 |phi><phi| + w2 |alpha><alpha| on the full system-environment space,
// with |phi> the scattered state and |alpha> the untouched one.
DensityOperator mixed_density(const IntensityMixture& mixture);

// Probability that at least one of two independent scattering chances
// fires: p_a + p_b - p_a p_b = 1 - (1-p_a)(1-p_b).  For p_a = p_b = p << 1
// this is approximately 2p, doubling the one-sided figure.
double two_sided_scatter_probability(double p_a, double p_b);

// Every model reduces to an intensity mixture: isolated is w1 = 0, the pure
// channels are w1 = 1, and two-sided sources compose their per-side odds.
IntensityMixture as_mixture(const EnvironmentModel& model);

// Reduced two-particle density of the model (dim-4).
DensityOperator reduced_density(const EnvironmentModel& model);

}  // namespace tcd
