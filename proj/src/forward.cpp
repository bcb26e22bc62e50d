#include "pci/forward.hpp"

#include "pci/errors.hpp"
#include "pci/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pci {

namespace {

void zero_outside(ComplexField& f, const SupportBox& box) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!box.contains(f.grid, i)) f[i] = 0.0;
  }
}

double radius_of(const Grid& g, std::size_t i) {
  if (g.ndim() == 1) return std::abs(g.position(0, i));
  return std::hypot(g.position(0, i / g.n(1)), g.position(1, i % g.n(1)));
}

}  // namespace

void PhaseAbsorptionProjection::validate() const {
  phi.validate();
  mu.validate();
  if (!(phi.grid == mu.grid)) throw ValidationError("projection: phi and mu live on different grids");
  for (double v : mu.values) {
    if (v < 0.0) throw ValidationError("projection: mu must be >= 0 (physical absorption)");
  }
}

Perturbation::Perturbation(ComplexField values, SupportBox box) : h(std::move(values)), support(box) {
  h.validate();
  support.validate(h.grid);
  zero_outside(h, support);
}

Perturbation Perturbation::zero(const Grid& grid, const SupportBox& box) {
  return Perturbation(ComplexField(grid), box);
}

SupportBox nonzero_box(const PhaseAbsorptionProjection& proj) {
  const Grid& g = proj.phi.grid;
  const std::size_t cols = g.ndim() == 2 ? g.n(1) : g.n(0);
  std::array<std::size_t, 2> lo{g.size(), g.size()};
  std::array<std::size_t, 2> hi{0, 0};
  bool any = false;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (proj.phi[i] == 0.0 && proj.mu[i] == 0.0) continue;
    any = true;
    const std::array<std::size_t, 2> idx =
        g.ndim() == 2 ? std::array<std::size_t, 2>{i / cols, i % cols} : std::array<std::size_t, 2>{i, 0};
    for (std::size_t a = 0; a < 2; ++a) {
      lo[a] = std::min(lo[a], idx[a]);
      hi[a] = std::max(hi[a], idx[a] + 1);
    }
  }
  SupportBox box;
  if (!any) {
    box.begin = {g.center(0), g.ndim() == 2 ? g.center(1) : 0};
    box.end = box.begin;
    return box;
  }
  box.begin = lo;
  box.end = hi;
  return box;
}

TransmissionFunction transmission_from_projection(const PhaseAbsorptionProjection& proj) {
  proj.validate();
  TransmissionFunction t{ComplexField(proj.phi.grid, cplx{1.0, 0.0}), nonzero_box(proj)};
  for (std::size_t i = 0; i < t.o.size(); ++i) {
    t.o[i] = std::exp(-proj.mu[i]) * std::polar(1.0, -proj.phi[i]);
  }
  return t;
}

PhaseAbsorptionProjection phantom_disc(const Grid& grid, double radius, double phi_in, double mu_in,
                                       double edge_width) {
  if (!(radius >= 0.0)) throw ValidationError("phantom: radius must be >= 0");
  if (mu_in < 0.0) throw ValidationError("phantom: mu must be >= 0");
  if (!(edge_width >= 0.0)) throw ValidationError("phantom: edge width must be >= 0");
  for (int a = 0; a < grid.ndim(); ++a) {
    const double half_extent = static_cast<double>(grid.n(a) / 2) * grid.spacing(a);
    if (2.0 * radius > half_extent * (1.0 + 1e-12)) {
      throw ValidationError("phantom: disc of radius R needs a margin of at least R inside the grid");
    }
  }
  PhaseAbsorptionProjection p{RealImage(grid), RealImage(grid)};
  const double ramp = edge_width * grid.spacing(grid.ndim() - 1);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = radius_of(grid, i);
    double weight = 0.0;
    if (ramp > 0.0) {
      const double t = (r - (radius - 0.5 * ramp)) / ramp;
      weight = t <= 0.0 ? 1.0 : t >= 1.0 ? 0.0 : 0.5 * (1.0 + std::cos(std::numbers::pi * t));
    } else {
      weight = r < radius ? 1.0 : 0.0;
    }
    p.phi[i] = weight * phi_in;
    p.mu[i] = weight * mu_in;
  }
  return p;
}

Perturbation perturbation_from_transmission(const TransmissionFunction& o, const ProbeSpec& probe,
                                            const ImagingGeometry& geom) {
  const Grid dimless = geom.dimensionless(o.o.grid);
  const ComplexField p = probe_field(probe, dimless);
  ComplexField h(dimless);
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = p[i] * (o.o[i] - 1.0);
  SupportBox box = o.support;
  if (box.count(dimless) == 0) box = SupportBox::whole(dimless);
  return Perturbation(std::move(h), box);
}

namespace {

ComplexField exit_wave(const TransmissionFunction& o, const ProbeSpec& probe, const ImagingGeometry& geom,
                       int pad_factor, bool subtract_one) {
  geom.validate();
  o.o.validate();
  if (o.o.grid.ndim() != geom.m) throw ValidationError("object dimension does not match geometry m");
  const ComplexField padded = pad_field(o.o, pad_factor, cplx{1.0, 0.0});
  const ComplexField p = probe_field(probe, geom.dimensionless(padded.grid));
  ComplexField psi(padded.grid);
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = p[i] * (subtract_one ? padded[i] - 1.0 : padded[i]);
  return psi;
}

RealImage detector_intensity(const ComplexField& propagated, const Grid& object_grid, bool crop) {
  RealImage out(propagated.grid);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::norm(propagated[i]);
  return crop ? crop_image(out, object_grid) : out;
}

}  // namespace

RealImage holographic_intensity(const TransmissionFunction& o, const ProbeSpec& probe, const ImagingGeometry& geom,
                                const HolographyOptions& options) {
  const ComplexField psi = exit_wave(o, probe, geom, options.pad_factor, false);
  return detector_intensity(fresnel_propagate_multiplier(psi, geom, geom.d), o.o.grid, options.crop);
}

RealImage intensity_linearized(const TransmissionFunction& o, const ProbeSpec& probe, const ImagingGeometry& geom,
                               const HolographyOptions& options) {
  RealImage full = holographic_intensity(o, probe, geom, options);
  const ComplexField scattered = exit_wave(o, probe, geom, options.pad_factor, true);
  const RealImage quad =
      detector_intensity(fresnel_propagate_multiplier(scattered, geom, geom.d), o.o.grid, options.crop);
  for (std::size_t i = 0; i < full.size(); ++i) full[i] -= quad[i];
  return full;
}

ComplexField scattered_spectrum(const Perturbation& h, const WeightSpec& weight) {
  h.h.validate();
  validate(weight);
  const ComplexField w = weight_field(weight, h.h.grid);
  ComplexField wh(h.h.grid);
  for (std::size_t i = 0; i < wh.size(); ++i) wh[i] = h.support.contains(h.h.grid, i) ? w[i] * h.h[i] : 0.0;
  return fourier_transform(wh);
}

RealImage operator_F(const Perturbation& h, const ProbeSpec& probe, const WeightSpec& weight) {
  const ComplexField g = scattered_spectrum(h, weight);
  const ComplexField r = reference_term(probe, g.grid);
  RealImage out(g.grid);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::norm(r[i] + g[i]);
  return out;
}

RealImage operator_F_lin(const Perturbation& h, const ProbeSpec& probe, const WeightSpec& weight) {
  const ComplexField g = scattered_spectrum(h, weight);
  const ComplexField r = reference_term(probe, g.grid);
  RealImage out(g.grid);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::norm(r[i] + g[i]) - std::norm(g[i]);
  return out;
}

RealImage operator_F_lin_expanded(const Perturbation& h, const ProbeSpec& probe, const WeightSpec& weight) {
  const ComplexField g = scattered_spectrum(h, weight);
  const ComplexField r = reference_term(probe, g.grid);
  RealImage out(g.grid);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::norm(r[i]) + 2.0 * (std::conj(r[i]) * g[i]).real();
  return out;
}

RealImage empty_beam_intensity(const Grid& detector, const ProbeSpec& probe, const ImagingGeometry& geom) {
  validate(probe);
  const Grid dimless = geom.dimensionless(detector);
  RealImage out(detector);
  if (const auto* p = std::get_if<PlaneWave>(&probe)) {
    std::fill(out.values.begin(), out.values.end(), std::norm(p->p0));
    return out;
  }
  if (const auto* p = std::get_if<GaussianBeam>(&probe)) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double r = dimless.ndim() == 1 ? dimless.position(0, i)
                                           : std::hypot(dimless.position(0, i / dimless.n(1)),
                                                        dimless.position(1, i % dimless.n(1)));
      out[i] = std::norm(p->p0) * std::exp(2.0 * p->alpha0.real() * r * r);
    }
    return out;
  }
  const ComplexField r = reference_term(probe, dimless);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::norm(r[i]);
  return out;
}

RealImage flat_field_normalize(const RealImage& intensity, const ProbeSpec& probe, const ImagingGeometry& geom) {
  intensity.validate();
  const RealImage flat = empty_beam_intensity(intensity.grid, probe, geom);
  const double peak = *std::max_element(flat.values.begin(), flat.values.end());
  RealImage out = intensity;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(flat[i] >= 1e-14 * peak) || flat[i] == 0.0) {
      throw DivisionByNearZero("flat field: empty-beam intensity below 1e-14 of its maximum");
    }
    out[i] = intensity[i] / flat[i];
  }
  return out;
}

}  // namespace pci
