#pragma once

#include "pci/grid.hpp"

#include <variant>

namespace pci {

/// Wavenumber k, propagation distance d and physical pixel size, all in the
/// same length unit; m is the number of lateral dimensions.
struct ImagingGeometry {
  double k = 1.0;
  double d = 1.0;
  double pixel = 1.0;
  int m = 1;

  void validate() const;
  /// Factor (k/d)^{1/2} mapping physical lateral coordinates to dimensionless ones.
  double scale() const;
  double dimensionless_spacing() const { return scale() * pixel; }
  /// Physical grid with `n` samples per lateral axis and spacing `pixel`.
  Grid physical_grid(std::size_t n) const;
  /// The same grid in dimensionless coordinates.
  Grid dimensionless(const Grid& physical) const;

  /// Distance for which an n-sample grid is critically sampled,
  /// k pixel^2 / d = 2 pi / n.
  static double critical_distance(double k, double pixel, std::size_t n);
  /// Distance for the dimensionless Fresnel number 2 pi d / (k R^2).
  static double distance_from_fresnel(double fresnel, double k, double radius);
};

struct PlaneWave {
  cplx p0{1.0, 0.0};
};

/// Gaussian beam whose detector-plane field is p0 e^{ikd} exp(alpha0 xi^2).
struct GaussianBeam {
  cplx p0{1.0, 0.0};
  cplx alpha0{-1.0, 0.0};
};

/// Compactly sampled p-check with quadratic exponent alpha; the reference
/// term is F(p_check) exp(alpha xi^2).
struct CustomCompact {
  ComplexField p_check;
  cplx alpha{0.0, -0.5};
};

using ProbeSpec = std::variant<PlaneWave, GaussianBeam, CustomCompact>;

void validate(const ProbeSpec& probe);
const char* probe_name(const ProbeSpec& probe);

struct FresnelChirp {};

struct CustomWeight {
  ComplexField w;
};

using WeightSpec = std::variant<FresnelChirp, CustomWeight>;

void validate(const WeightSpec& weight);

/// e^{-i m pi / 4}.
cplx gamma_factor(int m);

/// Throws AliasingError unless xi_max * dxi <= pi on every axis.
void check_chirp_sampling(const Grid& grid);
/// Throws AliasingError unless |d| sigma_max dsigma / k <= pi on every axis
/// of the physical grid.
void check_multiplier_sampling(const Grid& grid, double k, double distance);

/// w_F(xi) = exp(i xi^2 / 2) on a dimensionless grid.
ComplexField fresnel_chirp(const Grid& grid);
/// The weight evaluated on `grid`; custom weights must live on it already.
ComplexField weight_field(const WeightSpec& weight, const Grid& grid);

/// F^{-1}[ e^{ikd} e^{-i d sigma^2/(2k)} F(psi) ] on the physical grid of psi.
/// Negative distances propagate backwards exactly.
ComplexField fresnel_propagate_multiplier(const ComplexField& psi, double k, double signed_distance);
ComplexField fresnel_propagate_multiplier(const ComplexField& psi, const ImagingGeometry& geom,
                                          double signed_distance);

/// gamma e^{ikd} w_F F(w_F psi0) for a field on a dimensionless grid. The
/// result lives on the dual grid.
ComplexField fresnel_propagate_chirp(const ComplexField& psi0, const ImagingGeometry& geom);

/// e^{-ikd} D(p) / (gamma w_F) evaluated on the dimensionless data grid.
ComplexField reference_term(const ProbeSpec& probe, const Grid& data_grid);
ComplexField reference_term(const ProbeSpec& probe, const ImagingGeometry& geom, const Grid& data_grid);

/// Probe in the object plane on a dimensionless grid, i.e. the field p whose
/// propagation yields the reference term on the dual grid.
ComplexField probe_field(const ProbeSpec& probe, const Grid& object_grid);

/// |F(psi0)|^2 on the dual grid.
RealImage far_field_intensity(const ComplexField& psi0);

}  // namespace pci
