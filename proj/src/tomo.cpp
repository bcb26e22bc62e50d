#include "pci/tomo.hpp"

#include "pci/errors.hpp"
#include "pci/fourier.hpp"
#include "pci/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace pci {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_square(const Grid& g, const char* what) {
  if (g.ndim() != 2 || g.n(0) != g.n(1) || std::abs(g.spacing(0) - g.spacing(1)) > 1e-12 * g.spacing(0)) {
    throw ValidationError(std::string(what) + ": expected a square 2-D grid with equal spacings");
  }
}

double keys(double s) {
  constexpr double a = -0.5;
  s = std::abs(s);
  if (s <= 1.0) return ((a + 2.0) * s - (a + 3.0)) * s * s + 1.0;
  if (s < 2.0) return ((a * s - 5.0 * a) * s + 8.0 * a) * s - 4.0 * a;
  return 0.0;
}

// Samples f at fractional (row, col) index coordinates; outside is zero.
class Sampler {
public:
  Sampler(const RealImage& f, Interpolation interp)
      : f_(f), n_(static_cast<long>(f.grid.n(0))), interp_(interp) {}

  double operator()(double row, double col) const {
    const long r0 = static_cast<long>(std::floor(row));
    const long c0 = static_cast<long>(std::floor(col));
    const double tr = row - static_cast<double>(r0);
    const double tc = col - static_cast<double>(c0);
    if (interp_ == Interpolation::Bilinear) {
      return (1 - tr) * ((1 - tc) * at(r0, c0) + tc * at(r0, c0 + 1)) +
             tr * ((1 - tc) * at(r0 + 1, c0) + tc * at(r0 + 1, c0 + 1));
    }
    double wr[4];
    double wc[4];
    for (int i = 0; i < 4; ++i) {
      wr[i] = keys(tr - (i - 1));
      wc[i] = keys(tc - (i - 1));
    }
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
      double line = 0.0;
      for (int j = 0; j < 4; ++j) line += wc[j] * at(r0 + i - 1, c0 + j - 1);
      sum += wr[i] * line;
    }
    return sum;
  }

private:
  double at(long r, long c) const {
    if (r < 0 || c < 0 || r >= n_ || c >= n_) return 0.0;
    return f_.values[static_cast<std::size_t>(r * n_ + c)];
  }

  const RealImage& f_;
  long n_;
  Interpolation interp_;
};

}  // namespace

void Volume::validate() const {
  delta.validate();
  beta.validate();
  check_square(delta.grid, "volume");
  if (!(delta.grid == beta.grid)) throw ValidationError("volume: delta and beta grids differ");
  for (double b : beta.values) {
    if (b < 0.0) throw ValidationError("volume: beta must be >= 0");
  }
  if (!(support_radius > 0.0) || support_radius >= inscribed_radius(delta.grid) * (1.0 + 1e-12)) {
    throw ValidationError("volume: support radius must lie in (0, half grid extent)");
  }
  check_disc_support(delta, support_radius);
  check_disc_support(beta, support_radius);
}

void Sinogram::validate() const {
  if (detector.ndim() != 1) throw ValidationError("sinogram: detector grid must be 1-D");
  if (angles.empty()) throw ValidationError("sinogram: no angles");
  for (std::size_t a = 1; a < angles.size(); ++a) {
    if (!(angles[a] > angles[a - 1])) throw ValidationError("sinogram: angles must be strictly increasing");
  }
  if (values.size() != angles.size() * detector.n(0)) throw ValidationError("sinogram: size mismatch");
  for (double v : values) {
    if (!std::isfinite(v)) throw ValidationError("sinogram: non-finite values");
  }
}

std::span<const double> Sinogram::row(std::size_t a) const {
  return std::span<const double>(values).subspan(a * detector.n(0), detector.n(0));
}

double inscribed_radius(const Grid& grid) {
  return static_cast<double>(grid.n(0) / 2) * grid.spacing(0);
}

void check_disc_support(const RealImage& f, double radius) {
  const Grid& g = f.grid;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] == 0.0) continue;
    const double r = std::hypot(g.position(0, i / g.n(1)), g.position(1, i % g.n(1)));
    if (r >= radius) {
      throw SupportError("nonzero sample at radius " + std::to_string(r) + " outside the support disc " +
                         std::to_string(radius));
    }
  }
}

Grid detector_for(const Grid& volume_grid) {
  return Grid::line(volume_grid.n(1), volume_grid.spacing(1));
}

std::vector<double> uniform_angles(std::size_t n) {
  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = kPi * static_cast<double>(i) / static_cast<double>(n);
  return a;
}

Sinogram radon_2d(const RealImage& f, const std::vector<double>& angles, const Grid& detector,
                  const RadonOptions& options) {
  return radon_2d(f, angles, detector, inscribed_radius(f.grid), options);
}

Sinogram radon_2d(const RealImage& f, const std::vector<double>& angles, const Grid& detector, double support_radius,
                  const RadonOptions& options) {
  f.validate();
  check_square(f.grid, "radon");
  if (detector.ndim() != 1) throw ValidationError("radon: detector grid must be 1-D");
  if (!(options.step > 0.0)) throw ValidationError("radon: step must be > 0");
  check_disc_support(f, support_radius);

  const double dx = f.grid.spacing(0);
  const double h = options.step * dx;
  const auto half_steps = static_cast<long>(std::ceil(support_radius / h));
  const double center = static_cast<double>(f.grid.n(0) / 2);
  const std::size_t nd = detector.n(0);

  Sinogram s{angles, detector, std::vector<double>(angles.size() * nd, 0.0)};
  const Sampler sample(f, options.interp);
  parallel_for(angles.size(), [&](std::size_t a) {
    const double c = std::cos(angles[a]);
    const double sn = std::sin(angles[a]);
    for (std::size_t j = 0; j < nd; ++j) {
      const double x = detector.position(0, j);
      double sum = 0.0;
      for (long t = -half_steps; t <= half_steps; ++t) {
        const double y = static_cast<double>(t) * h;
        const double px = x * c - y * sn;
        const double py = x * sn + y * c;
        const double v = sample(py / dx + center, px / dx + center);
        sum += (t == -half_steps || t == half_steps) ? 0.5 * v : v;
      }
      s.values[a * nd + j] = sum * h;
    }
  });
  return s;
}

AngleProjection project_volume(const Volume& v, double theta, double k, const RadonOptions& options) {
  v.validate();
  if (!(k > 0.0)) throw ValidationError("project_volume: k must be > 0");
  const Grid det = detector_for(v.grid());
  const Sinogram rd = radon_2d(v.delta, {theta}, det, v.support_radius, options);
  const Sinogram rb = radon_2d(v.beta, {theta}, det, v.support_radius, options);
  PhaseAbsorptionProjection p{RealImage(det), RealImage(det)};
  for (std::size_t j = 0; j < det.n(0); ++j) {
    p.phi[j] = k * rd.values[j];
    // Interpolation overshoot can leave tiny negative line integrals of beta.
    p.mu[j] = std::max(0.0, k * rb.values[j]);
  }
  TransmissionFunction o = transmission_from_projection(p);
  return {std::move(p), std::move(o)};
}

PhaseWrapReport scan_phase(const Volume& v, double k, std::size_t n_angles) {
  v.validate();
  if (n_angles < 180) throw ValidationError("phase-wrap scan needs at least 180 angles");
  const Grid det = detector_for(v.grid());
  const std::vector<double> angles = uniform_angles(n_angles);
  // Bilinear weights are nonnegative, so R(delta) >= 0 whenever delta >= 0;
  // cubic overshoot at hard edges would report spurious negative phases.
  const Sinogram s = radon_2d(v.delta, angles, det, v.support_radius, RadonOptions{Interpolation::Bilinear, 0.5});
  PhaseWrapReport rep;
  rep.max_phase = -1.0;
  rep.min_phase = 0.0;
  for (std::size_t a = 0; a < angles.size(); ++a) {
    for (std::size_t j = 0; j < det.n(0); ++j) {
      const double phase = k * s.values[a * det.n(0) + j];
      if (phase > rep.max_phase) {
        rep.max_phase = phase;
        rep.theta_at_max = angles[a];
        rep.x_at_max = det.position(0, j);
      }
      rep.min_phase = std::min(rep.min_phase, phase);
    }
  }
  return rep;
}

Volume smooth_phantom(std::size_t n, double pixel, double k, double peak_phase, double peak_absorption) {
  if (n < 16 || n % 2 != 0) throw ValidationError("smooth phantom needs an even n >= 16");
  if (!(pixel > 0.0) || !(k > 0.0)) throw ValidationError("smooth phantom: pixel and k must be positive");
  if (!(peak_phase >= 0.0) || !(peak_absorption >= 0.0)) {
    throw ValidationError("smooth phantom: peak phase and absorption must be >= 0");
  }
  const Grid g = Grid::plane(n, n, pixel);
  // Bump centers and radii in units of n/64 pixels.
  const double u = static_cast<double>(n) / 64.0 * pixel;
  auto bumps = [&](std::initializer_list<std::array<double, 4>> list) {
    RealImage f(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double y = g.position(0, i / n);
      const double x = g.position(1, i % n);
      for (const auto& [cx, cy, a, amp] : list) {
        const double t = 1.0 - (std::pow(x - cx * u, 2) + std::pow(y - cy * u, 2)) / std::pow(a * u, 2);
        if (t > 0.0) f[i] += amp * t * t * t;
      }
    }
    return f;
  };
  Volume v{bumps({{0.0, 0.0, 14.0, 1.0}, {5.0, -4.0, 6.0, 0.6}}),
           bumps({{-3.0, 2.0, 9.0, 1.0}, {4.0, 4.0, 6.0, 0.5}}), 16.0 * u};
  const double pd = scan_phase(v, k).max_phase;
  const double pb = scan_phase(Volume{v.beta, v.delta, v.support_radius}, k).max_phase;
  for (auto& x : v.delta.values) x *= peak_phase / pd;
  for (auto& x : v.beta.values) x *= peak_absorption / pb;
  return v;
}

PhaseWrapReport check_no_phase_wrap(const Volume& v, double k, std::size_t n_angles) {
  const PhaseWrapReport rep = scan_phase(v, k, n_angles);
  if (rep.max_phase >= kTwoPi) {
    throw PhaseWrapError("k R(delta) reaches " + std::to_string(rep.max_phase) + " >= 2 pi at theta = " +
                             std::to_string(rep.theta_at_max) + ", x = " + std::to_string(rep.x_at_max),
                         rep.theta_at_max, rep.x_at_max, rep.max_phase);
  }
  if (rep.min_phase < -1e-12) {
    throw PhaseWrapError("k R(delta) is negative (" + std::to_string(rep.min_phase) + ")", 0.0, 0.0,
                         rep.min_phase);
  }
  return rep;
}

LineIntegrals log_transmission(const ComplexField& o, double k, double branch_margin) {
  o.validate();
  if (o.grid.ndim() != 1) throw ValidationError("log_transmission expects a 1-D transmission function");
  if (!(k > 0.0)) throw ValidationError("log_transmission: k must be > 0");
  if (branch_margin < 0.0 || branch_margin >= kPi) throw ValidationError("branch margin must lie in [0, pi)");
  LineIntegrals out{std::vector<double>(o.size()), std::vector<double>(o.size())};
  for (std::size_t j = 0; j < o.size(); ++j) {
    const double mag = std::abs(o[j]);
    if (mag < 1e-14) throw ZeroTransmission("transmission vanishes at sample " + std::to_string(j));
    // std::arg is in (-pi, pi]; shift into (-2 pi + margin, margin].
    double phase = std::arg(o[j]);
    if (phase > branch_margin) phase -= kTwoPi;
    out.r_delta[j] = -phase / k;
    out.r_beta[j] = -std::log(mag) / k;
  }
  return out;
}

RealImage fbp_reconstruct(const Sinogram& s, const FbpOptions& options) {
  s.validate();
  const std::size_t na = s.angles.size();
  if (na < 2) throw ValidationError("fbp needs at least 2 angles");
  const double dtheta = s.angles[1] - s.angles[0];
  for (std::size_t a = 1; a < na; ++a) {
    if (std::abs(s.angles[a] - s.angles[0] - static_cast<double>(a) * dtheta) > 1e-9) {
      throw ValidationError("fbp needs uniformly spaced angles");
    }
  }

  const std::size_t nd = s.detector.n(0);
  const double tau = s.detector.spacing(0);
  const Grid padded = Grid::line(2 * nd, tau);

  // Spatial Ram-Lak kernel sampled at integer offsets, centered on the padded grid.
  ComplexField kernel(padded);
  for (std::size_t j = 0; j < padded.n(0); ++j) {
    const long off = static_cast<long>(j) - static_cast<long>(nd);
    if (off == 0) {
      kernel[j] = 1.0 / (4.0 * tau * tau);
    } else if (off % 2 != 0) {
      kernel[j] = -1.0 / (kPi * kPi * static_cast<double>(off * off) * tau * tau);
    }
  }
  ComplexField kernel_hat = fourier_transform(kernel);
  const double root2pi = std::sqrt(kTwoPi);
  if (options.hann) {
    const double wmax = kPi / tau;
    for (std::size_t l = 0; l < kernel_hat.size(); ++l) {
      const double w = kernel_hat.grid.position(0, l);
      kernel_hat[l] *= 0.5 * (1.0 + std::cos(kPi * w / wmax));
    }
  }

  std::vector<std::vector<double>> filtered(na);
  parallel_for(na, [&](std::size_t a) {
    ComplexField row(s.detector);
    const auto src = s.row(a);
    for (std::size_t j = 0; j < nd; ++j) row[j] = src[j];
    ComplexField spec = fourier_transform(pad_field(row, 2, 0.0));
    for (std::size_t l = 0; l < spec.size(); ++l) spec[l] *= kernel_hat[l] * root2pi;
    ComplexField conv = inverse_fourier_transform(spec);
    conv.grid = padded;
    const ComplexField q = crop_field(conv, s.detector);
    filtered[a].resize(nd);
    for (std::size_t j = 0; j < nd; ++j) filtered[a][j] = q[j].real();
  });

  const Grid out_grid = Grid::plane(nd, nd, tau);
  RealImage out(out_grid);
  const double center = static_cast<double>(nd / 2);
  parallel_for(nd, [&](std::size_t r) {
    const double y = out_grid.position(0, r);
    for (std::size_t c = 0; c < nd; ++c) {
      const double x = out_grid.position(1, c);
      double sum = 0.0;
      for (std::size_t a = 0; a < na; ++a) {
        const double t = (x * std::cos(s.angles[a]) + y * std::sin(s.angles[a])) / tau + center;
        const double f = std::floor(t);
        const auto j0 = static_cast<long>(f);
        const double w = t - f;
        const auto& q = filtered[a];
        auto at = [&](long j) { return j < 0 || j >= static_cast<long>(nd) ? 0.0 : q[static_cast<std::size_t>(j)]; };
        sum += (1.0 - w) * at(j0) + w * at(j0 + 1);
      }
      out[r * nd + c] = sum * dtheta;
    }
  });
  return out;
}

std::vector<RealImage> tomo_forward(const Volume& v, const ProbeSpec& probe, const ImagingGeometry& geom,
                                    const std::vector<double>& angles, const TomoForwardOptions& options) {
  v.validate();
  geom.validate();
  if (geom.m != 1) throw ValidationError("tomo_forward works with m = 1 projections");
  if (std::abs(geom.pixel - v.grid().spacing(0)) > 1e-12 * geom.pixel) {
    throw ValidationError("tomo_forward: geometry pixel differs from the volume spacing");
  }
  if (angles.empty()) throw ValidationError("tomo_forward: no angles");
  if (options.check_phase_wrap) check_no_phase_wrap(v, geom.k);

  std::vector<RealImage> images(angles.size());
  parallel_for(angles.size(), [&](std::size_t a) {
    const AngleProjection p = project_volume(v, angles[a], geom.k, options.radon);
    images[a] = holographic_intensity(p.transmission, probe, geom, options.holography);
  });
  return images;
}

}  // namespace pci
