#include "pci/optics.hpp"

#include "pci/errors.hpp"
#include "pci/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace pci {

namespace {

constexpr double kPi = std::numbers::pi;
// Critically sampled grids sit exactly on the sampling limit; allow rounding.
constexpr double kSamplingSlack = 1e-9;

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

double squared_radius(const Grid& g, std::size_t i) {
  if (g.ndim() == 1) {
    const double x = g.position(0, i);
    return x * x;
  }
  const double y = g.position(0, i / g.n(1));
  const double x = g.position(1, i % g.n(1));
  return x * x + y * y;
}

double max_abs_position(const Grid& g, int axis) {
  return static_cast<double>(g.n(axis) / 2) * g.spacing(axis);
}

ComplexField gaussian_samples(const Grid& g, cplx amplitude, cplx exponent) {
  ComplexField f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = amplitude * std::exp(exponent * squared_radius(g, i));
  return f;
}

}  // namespace

void ImagingGeometry::validate() const {
  if (!(k > 0.0) || !std::isfinite(k)) throw ValidationError("geometry: k must be > 0");
  if (!(d > 0.0) || !std::isfinite(d)) throw ValidationError("geometry: d must be > 0");
  if (!(pixel > 0.0) || !std::isfinite(pixel)) throw ValidationError("geometry: pixel must be > 0");
  if (m != 1 && m != 2) throw ValidationError("geometry: m must be 1 or 2");
}

double ImagingGeometry::scale() const {
  validate();
  return std::sqrt(k / d);
}

Grid ImagingGeometry::physical_grid(std::size_t n) const {
  validate();
  return m == 1 ? Grid::line(n, pixel) : Grid::plane(n, n, pixel);
}

Grid ImagingGeometry::dimensionless(const Grid& physical) const {
  if (physical.ndim() != m) throw ValidationError("geometry: grid dimension does not match m");
  return physical.scaled(scale());
}

double ImagingGeometry::critical_distance(double k, double pixel, std::size_t n) {
  return k * pixel * pixel * static_cast<double>(n) / (2.0 * kPi);
}

double ImagingGeometry::distance_from_fresnel(double fresnel, double k, double radius) {
  if (!(fresnel > 0.0)) throw ValidationError("Fresnel number must be > 0");
  return fresnel * k * radius * radius / (2.0 * kPi);
}

void validate(const ProbeSpec& probe) {
  std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PlaneWave>) {
          if (p.p0 == cplx{} || !finite(p.p0)) throw ValidationError("plane wave: p0 must be nonzero");
        } else if constexpr (std::is_same_v<T, GaussianBeam>) {
          if (p.p0 == cplx{} || !finite(p.p0)) throw ValidationError("gaussian probe: p0 must be nonzero");
          if (!(p.alpha0.real() < 0.0)) throw ValidationError("gaussian probe: Re(alpha0) must be < 0");
          if (!(p.alpha0.imag() <= 0.0)) throw ValidationError("gaussian probe: Im(alpha0) must be <= 0");
        } else {
          p.p_check.validate();
          if (std::all_of(p.p_check.values.begin(), p.p_check.values.end(),
                          [](cplx v) { return v == cplx{}; })) {
            throw ValidationError("custom probe: p_check must not vanish identically");
          }
          if (p.alpha.imag() == 0.0 || !finite(p.alpha)) {
            throw ValidationError("custom probe: alpha must have nonzero imaginary part");
          }
        }
      },
      probe);
}

const char* probe_name(const ProbeSpec& probe) {
  switch (probe.index()) {
    case 0: return "plane";
    case 1: return "gaussian";
    default: return "custom";
  }
}

void validate(const WeightSpec& weight) {
  if (const auto* c = std::get_if<CustomWeight>(&weight)) {
    c->w.validate();
    for (const auto& v : c->w.values) {
      if (v == cplx{}) throw ValidationError("weight must be nonzero everywhere");
    }
  }
}

cplx gamma_factor(int m) {
  return std::polar(1.0, -static_cast<double>(m) * kPi / 4.0);
}

void check_chirp_sampling(const Grid& grid) {
  for (int a = 0; a < grid.ndim(); ++a) {
    const double product = max_abs_position(grid, a) * grid.spacing(a);
    if (product > kPi * (1.0 + kSamplingSlack)) {
      throw AliasingError("chirp undersampled on axis " + std::to_string(a) + ": xi_max*dxi = " +
                              std::to_string(product) + " > pi",
                          a);
    }
  }
}

void check_multiplier_sampling(const Grid& grid, double k, double distance) {
  const Grid dual = grid.dual();
  for (int a = 0; a < grid.ndim(); ++a) {
    const double product = std::abs(distance) * max_abs_position(dual, a) * dual.spacing(a) / k;
    if (product > kPi * (1.0 + kSamplingSlack)) {
      throw AliasingError("propagation multiplier undersampled on axis " + std::to_string(a) +
                              ": |d|*sigma_max*dsigma/k = " + std::to_string(product) + " > pi",
                          a);
    }
  }
}

ComplexField fresnel_chirp(const Grid& grid) {
  check_chirp_sampling(grid);
  return gaussian_samples(grid, 1.0, cplx{0.0, 0.5});
}

ComplexField weight_field(const WeightSpec& weight, const Grid& grid) {
  if (std::holds_alternative<FresnelChirp>(weight)) return fresnel_chirp(grid);
  const auto& w = std::get<CustomWeight>(weight).w;
  validate(weight);
  if (!w.grid.approx_equal(grid)) throw ValidationError("custom weight lives on a different grid");
  return w;
}

ComplexField fresnel_propagate_multiplier(const ComplexField& psi, double k, double signed_distance) {
  if (!(k > 0.0)) throw ValidationError("propagation: k must be > 0");
  if (!std::isfinite(signed_distance)) throw ValidationError("propagation distance must be finite");
  check_multiplier_sampling(psi.grid, k, signed_distance);
  ComplexField spectrum = fourier_transform(psi);
  const cplx global = std::polar(1.0, k * signed_distance);
  const double c = -signed_distance / (2.0 * k);
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    spectrum[i] *= global * std::polar(1.0, c * squared_radius(spectrum.grid, i));
  }
  ComplexField out = inverse_fourier_transform(spectrum);
  out.grid = psi.grid;
  return out;
}

ComplexField fresnel_propagate_multiplier(const ComplexField& psi, const ImagingGeometry& geom,
                                          double signed_distance) {
  geom.validate();
  if (psi.grid.ndim() != geom.m) throw ValidationError("propagation: field dimension does not match m");
  return fresnel_propagate_multiplier(psi, geom.k, signed_distance);
}

ComplexField fresnel_propagate_chirp(const ComplexField& psi0, const ImagingGeometry& geom) {
  geom.validate();
  if (psi0.grid.ndim() != geom.m) throw ValidationError("propagation: field dimension does not match m");
  const ComplexField w_in = fresnel_chirp(psi0.grid);
  ComplexField weighted(psi0.grid);
  for (std::size_t i = 0; i < weighted.size(); ++i) weighted[i] = w_in[i] * psi0[i];
  ComplexField out = fourier_transform(weighted);
  const ComplexField w_out = fresnel_chirp(out.grid);
  const cplx factor = gamma_factor(geom.m) * std::polar(1.0, geom.k * geom.d);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= factor * w_out[i];
  return out;
}

ComplexField reference_term(const ProbeSpec& probe, const Grid& data_grid) {
  validate(probe);
  const int m = data_grid.ndim();
  const cplx inv_gamma = 1.0 / gamma_factor(m);
  if (const auto* p = std::get_if<PlaneWave>(&probe)) {
    check_chirp_sampling(data_grid);
    return gaussian_samples(data_grid, p->p0 * inv_gamma, cplx{0.0, -0.5});
  }
  if (const auto* p = std::get_if<GaussianBeam>(&probe)) {
    check_chirp_sampling(data_grid);
    return gaussian_samples(data_grid, p->p0 * inv_gamma, p->alpha0 - cplx{0.0, 0.5});
  }
  const auto& c = std::get<CustomCompact>(probe);
  ComplexField spectrum = fourier_transform(c.p_check);
  if (!spectrum.grid.approx_equal(data_grid, 1e-9)) {
    throw ValidationError("custom probe: p_check grid is not dual to the data grid");
  }
  spectrum.grid = data_grid;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    spectrum[i] *= std::exp(c.alpha * squared_radius(data_grid, i));
  }
  return spectrum;
}

ComplexField reference_term(const ProbeSpec& probe, const ImagingGeometry& geom, const Grid& data_grid) {
  geom.validate();
  if (data_grid.ndim() != geom.m) throw ValidationError("reference term: grid dimension does not match m");
  return reference_term(probe, data_grid);
}

ComplexField probe_field(const ProbeSpec& probe, const Grid& object_grid) {
  validate(probe);
  const int m = object_grid.ndim();
  if (const auto* p = std::get_if<PlaneWave>(&probe)) return ComplexField(object_grid, p->p0);
  if (const auto* p = std::get_if<GaussianBeam>(&probe)) {
    // Back-propagating exp(alpha0 xi^2) over one dimensionless unit gives
    // 1/alpha = 1/alpha0 + 2i; the amplitude follows from the Gaussian
    // Fourier pair F(e^{a xi^2}) = (-2a)^{-1/2} e^{xi^2/(4a)} per axis.
    const cplx alpha = p->alpha0 / (1.0 + cplx{0.0, 2.0} * p->alpha0);
    const cplx a = alpha + cplx{0.0, 0.5};
    const cplx amplitude = p->p0 / gamma_factor(m) * std::pow(std::sqrt(-2.0 * a), m);
    return gaussian_samples(object_grid, amplitude, alpha);
  }
  const ComplexField r = reference_term(probe, object_grid.dual());
  ComplexField p = inverse_fourier_transform(r);
  p.grid = object_grid;
  const ComplexField w = fresnel_chirp(object_grid);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] *= std::conj(w[i]);
  return p;
}

RealImage far_field_intensity(const ComplexField& psi0) {
  const ComplexField spectrum = fourier_transform(psi0);
  RealImage out(spectrum.grid);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::norm(spectrum[i]);
  return out;
}

}  // namespace pci
