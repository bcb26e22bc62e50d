#pragma once

// Shared helpers for the test binaries: seeded generators and brute-force
// oracles that share no code with the library transforms.

#include "pci/grid.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

namespace pci::test {

inline constexpr double kPi = std::numbers::pi;

class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double normal() { return normal_(gen_); }
  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(gen_); }
  cplx complex_normal() { return {normal(), normal()}; }

private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

inline ComplexField random_field(const Grid& g, Rng& rng) {
  ComplexField f(g);
  for (auto& v : f.values) v = rng.complex_normal();
  return f;
}

inline ComplexField random_supported(const Grid& g, const SupportBox& box, Rng& rng) {
  ComplexField f(g);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (box.contains(g, i)) f[i] = rng.complex_normal();
  }
  return f;
}

inline std::vector<double> random_real(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

/// Direct O(n^2) evaluation of dx (2 pi)^{-1/2} sum_j f_j exp(-i xi_l x_j)
/// on a 1-D grid, using the grid positions only.
inline std::vector<cplx> direct_dft_1d(const ComplexField& f) {
  const Grid& g = f.grid;
  const Grid dual = g.dual();
  std::vector<cplx> out(g.n(0));
  for (std::size_t l = 0; l < g.n(0); ++l) {
    cplx s = 0.0;
    for (std::size_t j = 0; j < g.n(0); ++j) {
      s += f[j] * std::exp(cplx{0.0, -dual.position(0, l) * g.position(0, j)});
    }
    out[l] = s * g.spacing(0) / std::sqrt(2.0 * kPi);
  }
  return out;
}

/// Direct 2-D transform at one arbitrary frequency (kx along columns, ky along rows).
inline cplx direct_dft_2d_at(const std::vector<double>& f, const Grid& g, double ky, double kx) {
  cplx s = 0.0;
  for (std::size_t r = 0; r < g.n(0); ++r) {
    for (std::size_t c = 0; c < g.n(1); ++c) {
      const double v = f[r * g.n(1) + c];
      if (v == 0.0) continue;
      s += v * std::exp(cplx{0.0, -(ky * g.position(0, r) + kx * g.position(1, c))});
    }
  }
  return s * g.spacing(0) * g.spacing(1) / (2.0 * kPi);
}

/// Relative error of two complex sequences, ||a - b|| / ||b||.
inline double rel(const std::vector<cplx>& a, const std::vector<cplx>& b) { return relative_error(a, b); }

}  // namespace pci::test

namespace pci::test {

/// Adaptive Simpson quadrature of a complex integrand on [a, b].
template <typename F>
cplx adaptive_simpson(F&& f, double a, double b, double tol, int depth = 50) {
  struct Step {
    static cplx run(F& f, double a, double b, cplx fa, cplx fm, cplx fb, cplx whole, double tol, int depth) {
      const double m = 0.5 * (a + b);
      const double lm = 0.5 * (a + m);
      const double rm = 0.5 * (m + b);
      const cplx flm = f(lm);
      const cplx frm = f(rm);
      const cplx left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      const cplx right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      const cplx delta = left + right - whole;
      if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
      return run(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
             run(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    }
  };
  const cplx fa = f(a);
  const cplx fb = f(b);
  const cplx fm = f(0.5 * (a + b));
  const cplx whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return Step::run(f, a, b, fa, fm, fb, whole, tol, depth);
}

/// Direct O(n^2) midpoint-rule evaluation of the 1-D Fresnel integral
///   psi_d(x') = e^{ikd} (k / (2 pi i d))^{1/2} sum_j e^{ik(x'-x_j)^2/(2d)} psi_j dx
/// at every sample of `targets`.
inline std::vector<cplx> fresnel_quadrature_1d(const ComplexField& psi, double k, double d, const Grid& targets) {
  const Grid& g = psi.grid;
  const cplx prefactor =
      std::polar(1.0, k * d) * std::sqrt(k / (2.0 * kPi * d)) * std::polar(1.0, -kPi / 4.0);
  std::vector<cplx> out(targets.n(0));
  for (std::size_t l = 0; l < targets.n(0); ++l) {
    const double xp = targets.position(0, l);
    cplx s = 0.0;
    for (std::size_t j = 0; j < g.n(0); ++j) {
      const double dx = xp - g.position(0, j);
      s += std::polar(1.0, k * dx * dx / (2.0 * d)) * psi[j];
    }
    out[l] = prefactor * s * g.spacing(0);
  }
  return out;
}

}  // namespace pci::test
