#pragma once

#include "pci/grid.hpp"
#include "pci/optics.hpp"

namespace pci {

/// phi = k * integral(delta) and mu = k * integral(beta) on a lateral grid.
struct PhaseAbsorptionProjection {
  RealImage phi;
  RealImage mu;

  void validate() const;
};

/// Object transmission function, equal to 1 outside `support`.
struct TransmissionFunction {
  ComplexField o;
  SupportBox support;
};

/// Scattering perturbation h = p (o - 1), zero outside `support`.
struct Perturbation {
  ComplexField h;
  SupportBox support;

  Perturbation() = default;
  /// Zeroes `values` outside the box.
  Perturbation(ComplexField values, SupportBox box);
  static Perturbation zero(const Grid& grid, const SupportBox& box);
};

/// Smallest box containing every sample where phi or mu is nonzero; an
/// empty projection yields an empty box at the grid center.
SupportBox nonzero_box(const PhaseAbsorptionProjection& proj);

TransmissionFunction transmission_from_projection(const PhaseAbsorptionProjection& proj);

/// Disc phantom of radius R (in grid units). `edge_width` > 0 replaces the
/// hard edge by a cosine ramp of that many pixels.
PhaseAbsorptionProjection phantom_disc(const Grid& grid, double radius, double phi_in, double mu_in,
                                       double edge_width = 0.0);

/// h = p (o - 1) with the probe evaluated on the dimensionless object grid.
Perturbation perturbation_from_transmission(const TransmissionFunction& o, const ProbeSpec& probe,
                                            const ImagingGeometry& geom);

struct HolographyOptions {
  int pad_factor = 2;
  /// Crop the propagated field back to the object window; otherwise the
  /// whole padded detector is returned.
  bool crop = true;
};

/// |D_d(P O)|^2 on the physical detector grid. O is padded with 1 and the
/// probe is evaluated on the padded grid before propagation.
RealImage holographic_intensity(const TransmissionFunction& o, const ProbeSpec& probe, const ImagingGeometry& geom,
                                const HolographyOptions& options = {});

/// I_d - |D_d(P (O - 1))|^2.
RealImage intensity_linearized(const TransmissionFunction& o, const ProbeSpec& probe, const ImagingGeometry& geom,
                               const HolographyOptions& options = {});

/// F(h) = |R + F(w h)|^2 on the dual of the object grid.
RealImage operator_F(const Perturbation& h, const ProbeSpec& probe, const WeightSpec& weight);

/// F_lin(h) = F(h) - |F(w h)|^2.
RealImage operator_F_lin(const Perturbation& h, const ProbeSpec& probe, const WeightSpec& weight);
/// F_lin(h) evaluated as |R|^2 + 2 Re(conj(R) F(w h)).
RealImage operator_F_lin_expanded(const Perturbation& h, const ProbeSpec& probe, const WeightSpec& weight);

/// F(w h) on the dual grid.
ComplexField scattered_spectrum(const Perturbation& h, const WeightSpec& weight);

/// I / |D(P)|^2 on the physical detector grid of I.
RealImage flat_field_normalize(const RealImage& intensity, const ProbeSpec& probe, const ImagingGeometry& geom);

/// Empty-beam intensity |D(P)|^2 on a physical detector grid.
RealImage empty_beam_intensity(const Grid& detector, const ProbeSpec& probe, const ImagingGeometry& geom);

}  // namespace pci
