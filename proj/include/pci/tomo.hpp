#pragma once

#include "pci/forward.hpp"
#include "pci/grid.hpp"
#include "pci/optics.hpp"

#include <vector>

namespace pci {

/// Slice of delta and beta over the rotation plane. Both fields vanish
/// outside the disc of radius `support_radius` (physical units).
struct Volume {
  RealImage delta;
  RealImage beta;
  double support_radius = 0.0;

  void validate() const;
  const Grid& grid() const { return delta.grid; }
};

/// Parallel-beam data, angle-major: values[a * detector.n(0) + j].
struct Sinogram {
  std::vector<double> angles;
  Grid detector;
  std::vector<double> values;

  void validate() const;
  std::span<const double> row(std::size_t a) const;
};

enum class Interpolation { Bilinear, KeysCubic };

struct RadonOptions {
  Interpolation interp = Interpolation::KeysCubic;
  /// Integration step along each line in units of the grid spacing.
  double step = 0.5;
};

/// Largest disc inscribed in the square grid.
double inscribed_radius(const Grid& grid);
/// Throws SupportError if `f` has a nonzero sample at radius >= `radius`.
void check_disc_support(const RealImage& f, double radius);

/// R f(theta, x) = integral f(x theta + y theta_perp) dy with
/// theta = (cos, sin) in (column, row) coordinates.
Sinogram radon_2d(const RealImage& f, const std::vector<double>& angles, const Grid& detector,
                  const RadonOptions& options = {});
Sinogram radon_2d(const RealImage& f, const std::vector<double>& angles, const Grid& detector, double support_radius,
                  const RadonOptions& options = {});

/// Detector grid matching a square volume grid.
Grid detector_for(const Grid& volume_grid);

/// n angles theta_a = a pi / n.
std::vector<double> uniform_angles(std::size_t n);

struct AngleProjection {
  PhaseAbsorptionProjection projection;
  TransmissionFunction transmission;
};

AngleProjection project_volume(const Volume& v, double theta, double k, const RadonOptions& options = {});

struct PhaseWrapReport {
  double max_phase = 0.0;
  double min_phase = 0.0;
  double theta_at_max = 0.0;
  double x_at_max = 0.0;
};

/// Maximum of k R(delta) over `n_angles` (>= 180) uniformly spaced angles.
/// Throws PhaseWrapError if max >= 2 pi or min < -1e-12.
PhaseWrapReport check_no_phase_wrap(const Volume& v, double k, std::size_t n_angles = 180);
/// Same scan without throwing.
PhaseWrapReport scan_phase(const Volume& v, double k, std::size_t n_angles = 180);

struct LineIntegrals {
  std::vector<double> r_delta;
  std::vector<double> r_beta;
};

/// Inverts o = exp(-i k (R delta - i R beta)) on the branch
/// Im(log o) in (-2 pi + margin, margin].
LineIntegrals log_transmission(const ComplexField& o, double k, double branch_margin = 0.0);

struct FbpOptions {
  bool hann = false;
};

/// Filtered backprojection (Ram-Lak, optional Hann) onto the square grid
/// with the detector's sample count and spacing.
RealImage fbp_reconstruct(const Sinogram& s, const FbpOptions& options = {});

struct TomoForwardOptions {
  bool check_phase_wrap = true;
  HolographyOptions holography{2, false};
  RadonOptions radon{};
};

/// Smooth test slice on an n x n grid: two overlapping (1 - r^2/a^2)^3
/// bumps each for delta and beta, scaled so that the largest projected
/// phase k R(delta) is `peak_phase` and the largest k R(beta) is
/// `peak_absorption`. The support disc has radius n/4 pixels.
Volume smooth_phantom(std::size_t n, double pixel, double k, double peak_phase, double peak_absorption);

/// Per-angle holographic intensities (m = 1) of the volume.
std::vector<RealImage> tomo_forward(const Volume& v, const ProbeSpec& probe, const ImagingGeometry& geom,
                                    const std::vector<double>& angles, const TomoForwardOptions& options = {});

}  // namespace pci
