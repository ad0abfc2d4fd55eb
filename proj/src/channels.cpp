#include "tcd/channels.hpp"

#include <cmath>
#include <string>

namespace tcd {

namespace {

constexpr double kPairNormTol = 1e-12;

// Flat indices on the [a-slit:2, b-slit:2, env:3] layout.
constexpr std::size_t idx(std::size_t a, std::size_t b, std::size_t e) {
  return a * 6 + b * 3 + e;
}

void require_system_env_layout(const StateVector& v) {
  if (!(v.layout == system_env_layout())) {
    throw LayoutError("expected the [a-slit, b-slit, env] layout");
  }
}

void require_env_ready(const StateVector& v) {
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t b = 0; b < 2; ++b) {
      for (std::size_t e = 1; e < 3; ++e) {
        if (std::abs(v.amps[idx(a, b, e)]) > 1e-12) {
          throw ValidationError("channel precondition: environment is not in the ready state");
        }
      }
    }
  }
}

}  // namespace

void PartialWhichPath::validate() const {
  const double total = std::norm(near_amp) + std::norm(far_amp);
  if (std::abs(total - 0.5) > kPairNormTol) {
    throw ValidationError("which-path amplitudes must satisfy |n|^2 + |m|^2 = 1/2");
  }
}

PartialWhichPath PartialWhichPath::make(Complex n, Complex m) {
  PartialWhichPath p{n, m};
  p.validate();
  return p;
}

PartialWhichPath PartialWhichPath::from_near_amplitude(double n) {
  if (!(n >= 0.0) || n * n > 0.5 + kPairNormTol) {
    throw ValidationError("near amplitude must lie in [0, 1/sqrt 2]");
  }
  const double m2 = std::max(0.0, 0.5 - n * n);
  return PartialWhichPath{Complex(n, 0.0), Complex(std::sqrt(m2), 0.0)};
}

PartialWhichPath PartialWhichPath::small_wavelength() {
  return PartialWhichPath{Complex(1.0 / std::sqrt(2.0), 0.0), Complex(0.0, 0.0)};
}

PartialWhichPath PartialWhichPath::large_wavelength() {
  return PartialWhichPath{Complex(0.5, 0.0), Complex(0.5, 0.0)};
}

void IntensityMixture::validate() const {
  if (!(w1 >= 0.0 && w1 <= 1.0)) {
    throw ValidationError("scattering probability w1 must lie in [0, 1]");
  }
  if (which_path) which_path->validate();
}

IntensityMixture IntensityMixture::make(double w1, std::optional<PartialWhichPath> which_path) {
  IntensityMixture m{w1, std::move(which_path)};
  m.validate();
  return m;
}

void TwoSidedSources::validate() const {
  if (!(p_a >= 0.0 && p_a <= 1.0) || !(p_b >= 0.0 && p_b <= 1.0)) {
    throw ValidationError("per-side scattering probabilities must lie in [0, 1]");
  }
  if (which_path) which_path->validate();
}

TwoSidedSources TwoSidedSources::make(double p_a, double p_b,
                                      std::optional<PartialWhichPath> which_path) {
  TwoSidedSources t{p_a, p_b, std::move(which_path)};
  t.validate();
  return t;
}

void validate_model(const EnvironmentModel& model) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (!std::is_same_v<T, Isolated> && !std::is_same_v<T, FullDecoherence>) {
          m.validate();
        }
      },
      model);
}

HilbertLayout two_particle_layout() {
  return HilbertLayout{{{labels::a_slit, 2}, {labels::b_slit, 2}}};
}

HilbertLayout system_env_layout() {
  return HilbertLayout{{{labels::a_slit, 2}, {labels::b_slit, 2}, {labels::env, 3}}};
}

StateVector initial_state() {
  const double r = 1.0 / std::sqrt(2.0);
  return make_state(two_particle_layout(), {0.0, r, r, 0.0});
}

StateVector attach_environment(const StateVector& v) {
  if (!(v.layout == two_particle_layout())) {
    throw LayoutError("attach_environment: expected the [a-slit, b-slit] layout");
  }
  return kron(v, basis_state(HilbertLayout{{{labels::env, 3}}}, {0}));
}

StateVector apply_full_decoherence(const StateVector& v) {
  require_system_env_layout(v);
  require_env_ready(v);
  std::vector<Complex> out(12, Complex(0.0, 0.0));
  out[idx(0, 1, 1)] = v.amps[idx(0, 1, 0)];
  out[idx(1, 0, 2)] = v.amps[idx(1, 0, 0)];
  out[idx(0, 0, 0)] = v.amps[idx(0, 0, 0)];
  out[idx(1, 1, 0)] = v.amps[idx(1, 1, 0)];
  return StateVector{v.layout, std::move(out)};
}

StateVector apply_partial_decoherence(const StateVector& v, const PartialWhichPath& p) {
  require_system_env_layout(v);
  require_env_ready(v);
  p.validate();
  // The branch amplitudes scale by sqrt(2) so that acting on the
  // anticorrelated pair reproduces the four-term scattered state exactly;
  // |n|^2 + |m|^2 = 1/2 makes the map unitary on the populated subspace.
  const double s2 = std::sqrt(2.0);
  std::vector<Complex> out(12, Complex(0.0, 0.0));
  out[idx(0, 1, 1)] = s2 * p.near_amp * v.amps[idx(0, 1, 0)];
  out[idx(0, 1, 2)] = s2 * p.far_amp * v.amps[idx(0, 1, 0)];
  out[idx(1, 0, 2)] = s2 * p.near_amp * v.amps[idx(1, 0, 0)];
  out[idx(1, 0, 1)] = s2 * p.far_amp * v.amps[idx(1, 0, 0)];
  out[idx(0, 0, 0)] = v.amps[idx(0, 0, 0)];
  out[idx(1, 1, 0)] = v.amps[idx(1, 1, 0)];
  return StateVector{v.layout, std::move(out)};
}

DensityOperator reduced_two_particle(const StateVector& v) {
  require_system_env_layout(v);
  return partial_trace(dm_from_state(v), {labels::a_slit, labels::b_slit});
}

DensityOperator reduced_two_particle(const DensityOperator& rho) {
  if (!(rho.layout == system_env_layout())) {
    throw LayoutError("expected the [a-slit, b-slit, env] layout");
  }
  return partial_trace(rho, {labels::a_slit, labels::b_slit});
}

DensityOperator mixed_density(const IntensityMixture& mixture) {
  mixture.validate();
  const StateVector ready = attach_environment(initial_state());
  const StateVector scattered = mixture.which_path
                                    ? apply_partial_decoherence(ready, *mixture.which_path)
                                    : apply_full_decoherence(ready);
  return mix(dm_from_state(scattered), dm_from_state(ready), mixture.w1);
}

double two_sided_scatter_probability(double p_a, double p_b) {
  if (!(p_a >= 0.0 && p_a <= 1.0) || !(p_b >= 0.0 && p_b <= 1.0)) {
    throw ValidationError("scattering probabilities must lie in [0, 1]");
  }
  // Inclusion-exclusion over the two independent chances; algebraically
  // 1 - (1-p_a)(1-p_b).
  return p_a + p_b - p_a * p_b;
}

IntensityMixture as_mixture(const EnvironmentModel& model) {
  validate_model(model);
  struct Visitor {
    IntensityMixture operator()(const Isolated&) const { return IntensityMixture{0.0, {}}; }
    IntensityMixture operator()(const FullDecoherence&) const { return IntensityMixture{1.0, {}}; }
    IntensityMixture operator()(const PartialWhichPath& p) const {
      return IntensityMixture{1.0, p};
    }
    IntensityMixture operator()(const IntensityMixture& m) const { return m; }
    IntensityMixture operator()(const TwoSidedSources& t) const {
      return IntensityMixture{two_sided_scatter_probability(t.p_a, t.p_b), t.which_path};
    }
  };
  return std::visit(Visitor{}, model);
}

DensityOperator reduced_density(const EnvironmentModel& model) {
  return reduced_two_particle(mixed_density(as_mixture(model)));
}

}  // namespace tcd
