#include "tcd/reference.hpp"

#include <cstddef>

namespace tcd::reference {

namespace {

std::vector<std::size_t> digits_of(std::size_t flat, const std::vector<Factor>& fs) {
  std::vector<std::size_t> digits(fs.size(), 0);
  for (std::size_t i = fs.size(); i-- > 0;) {
    digits[i] = flat % fs[i].dim;
    flat /= fs[i].dim;
  }
  return digits;
}

}  // namespace

DensityOperator partial_trace(const DensityOperator& rho, const std::vector<std::string>& keep) {
  const auto& fs = rho.layout.factors();
  std::vector<bool> is_kept(fs.size(), false);
  for (const std::string& label : keep) is_kept[rho.layout.index_of_label(label)] = true;

  std::vector<Factor> kept_factors;
  for (std::size_t f = 0; f < fs.size(); ++f) {
    if (is_kept[f]) kept_factors.push_back(fs[f]);
  }
  HilbertLayout out_layout{kept_factors};
  const std::size_t out_dim = out_layout.total_dim();
  const std::size_t d = rho.dim();

  std::vector<Complex> mat(out_dim * out_dim, Complex(0.0, 0.0));
  for (std::size_t r = 0; r < d; ++r) {
    const std::vector<std::size_t> rd = digits_of(r, fs);
    for (std::size_t c = 0; c < d; ++c) {
      const std::vector<std::size_t> cd = digits_of(c, fs);
      bool traced_match = true;
      for (std::size_t f = 0; f < fs.size(); ++f) {
        if (!is_kept[f] && rd[f] != cd[f]) {
          traced_match = false;
          break;
        }
      }
      if (!traced_match) continue;
      std::vector<std::size_t> rkept, ckept;
      for (std::size_t f = 0; f < fs.size(); ++f) {
        if (is_kept[f]) {
          rkept.push_back(rd[f]);
          ckept.push_back(cd[f]);
        }
      }
      mat[out_layout.flat_index(rkept) * out_dim + out_layout.flat_index(ckept)] +=
          rho.mat[r * d + c];
    }
  }
  return DensityOperator{std::move(out_layout), std::move(mat)};
}

StateVector random_state(HilbertLayout layout, SplitMix64& rng) {
  std::vector<Complex> amps(layout.total_dim());
  for (Complex& a : amps) {
    a = Complex(rng.next_double(-1.0, 1.0), rng.next_double(-1.0, 1.0));
  }
  StateVector v{std::move(layout), std::move(amps)};
  v.normalize();
  return v;
}

StateVector random_product_state(const std::vector<HilbertLayout>& parts, SplitMix64& rng) {
  StateVector v = random_state(parts.front(), rng);
  for (std::size_t i = 1; i < parts.size(); ++i) {
    v = kron(v, random_state(parts[i], rng));
  }
  return v;
}

DensityOperator random_density(HilbertLayout layout, SplitMix64& rng, std::size_t terms) {
  std::vector<double> weights(terms);
  double total = 0.0;
  for (double& w : weights) {
    w = rng.next_double() + 1e-3;
    total += w;
  }
  const std::size_t d = layout.total_dim();
  std::vector<Complex> mat(d * d, Complex(0.0, 0.0));
  for (std::size_t t = 0; t < terms; ++t) {
    const StateVector v = random_state(layout, rng);
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = 0; c < d; ++c) {
        mat[r * d + c] += (weights[t] / total) * v.amps[r] * std::conj(v.amps[c]);
      }
    }
  }
  return DensityOperator{std::move(layout), std::move(mat)};
}

}  // namespace tcd::reference
