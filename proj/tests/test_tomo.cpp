#include "doctest.h"

#include "pci/errors.hpp"
#include "pci/fourier.hpp"
#include "pci/tomo.hpp"
#include "support.hpp"

#include <cmath>

using namespace pci;
using pci::test::kPi;

namespace {

// (1 - r^2/a^2)^p inside radius a around (cx, cy), zero outside.
RealImage bump(const Grid& g, double cx, double cy, double a, int p, double scale = 1.0) {
  RealImage f(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double y = g.position(0, i / g.n(1)) - cy;
    const double x = g.position(1, i % g.n(1)) - cx;
    const double r2 = (x * x + y * y) / (a * a);
    f[i] = r2 < 1.0 ? scale * std::pow(1.0 - r2, p) : 0.0;
  }
  return f;
}

RealImage add(RealImage a, const RealImage& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

double total(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

TEST_CASE("radon transform of a disc is the chord length") {
  const std::size_t n = 256;
  const Grid g = Grid::plane(n, n, 1.0);
  const double R = 60.0;
  RealImage disc(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    disc[i] = std::hypot(g.position(0, i / n), g.position(1, i % n)) < R ? 1.0 : 0.0;
  }
  const std::vector<double> angles{0.0, 0.4, kPi / 4, 2.0};
  const Sinogram s = radon_2d(disc, angles, detector_for(g));
  double worst = 0.0;
  for (std::size_t a = 0; a < angles.size(); ++a) {
    std::vector<double> chord(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double x = s.detector.position(0, j);
      chord[j] = std::abs(x) < R ? 2.0 * std::sqrt(R * R - x * x) : 0.0;
    }
    worst = std::max(worst, relative_error(s.row(a), chord));
  }
  CHECK(worst <= 0.01);
}

TEST_CASE("radon mass conservation over random smooth phantoms") {
  test::Rng rng(51);
  const Grid g = Grid::plane(64, 64, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    RealImage f(g);
    for (int b = 0; b < 3; ++b) {
      const double a = rng.uniform(14.0, 24.0);
      const double cx = rng.uniform(-6.0, 6.0), cy = rng.uniform(-6.0, 6.0);
      f = add(f, bump(g, cx, cy, a, 4, rng.uniform(0.2, 1.0)));
    }
    const double mass = total(f.values);
    const Sinogram s = radon_2d(f, uniform_angles(16), detector_for(g));
    for (std::size_t a = 0; a < 16; ++a) {
      const auto row = s.row(a);
      worst = std::max(worst, std::abs(total({row.begin(), row.end()}) - mass) / mass);
    }
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("radially symmetric objects give identical projections") {
  const Grid g = Grid::plane(128, 128, 1.0);
  const RealImage f = bump(g, 0.0, 0.0, 55.0, 6);
  const Sinogram s = radon_2d(f, uniform_angles(6), detector_for(g));
  double peak = 0.0;
  double diff = 0.0;
  for (std::size_t a = 0; a < 6; ++a) {
    for (std::size_t j = 0; j < 128; ++j) {
      peak = std::max(peak, s.values[j]);
      diff = std::max(diff, std::abs(s.values[a * 128 + j] - s.values[j]));
    }
  }
  CHECK(diff <= 1e-6 * peak);
}

TEST_CASE("fourier slice theorem") {
  // F_1(R f)(w) = sqrt(2 pi) F_2(f)(w theta), with the 2-D transform summed directly.
  const Grid g = Grid::plane(128, 128, 1.0);
  const RealImage f = add(bump(g, 5.0, -3.0, 40.0, 4), bump(g, -10.0, 8.0, 20.0, 3, 0.5));
  const std::vector<double> angles{0.0, 0.3, kPi / 4, 1.1, 2.5};
  const Sinogram s = radon_2d(f, angles, detector_for(g));
  double worst = 0.0;
  for (std::size_t a = 0; a < angles.size(); ++a) {
    ComplexField row(s.detector);
    for (std::size_t j = 0; j < 128; ++j) row[j] = s.values[a * 128 + j];
    const ComplexField Frow = fourier_transform(row);
    double peak = 0.0;
    double err = 0.0;
    for (std::size_t l = 32; l <= 96; ++l) {
      const double w = Frow.grid.position(0, l);
      const cplx slice =
          std::sqrt(2 * kPi) * test::direct_dft_2d_at(f.values, g, w * std::sin(angles[a]), w * std::cos(angles[a]));
      peak = std::max(peak, std::abs(slice));
      err = std::max(err, std::abs(Frow[l] - slice));
    }
    worst = std::max(worst, err / peak);
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("radon rejects objects outside the disc") {
  const Grid g = Grid::plane(32, 32, 1.0);
  RealImage f(g);
  f[0] = 1.0;
  CHECK_THROWS_AS(radon_2d(f, {0.0}, detector_for(g)), SupportError);
}

TEST_CASE("bilinear interpolation stays available") {
  const Grid g = Grid::plane(64, 64, 1.0);
  const RealImage f = bump(g, 0.0, 0.0, 20.0, 3);
  const Sinogram s = radon_2d(f, {0.0, 1.0}, detector_for(g), RadonOptions{Interpolation::Bilinear, 0.5});
  const double mass = total(f.values);
  CHECK(std::abs(total({s.row(1).begin(), s.row(1).end()}) - mass) <= 1e-3 * mass);
}

TEST_CASE("projections of volumes") {
  const std::size_t n = 128;
  const Grid g = Grid::plane(n, n, 1.0);
  const Volume zero{RealImage(g), RealImage(g), 60.0};
  const AngleProjection p0 = project_volume(zero, 0.7, 2.0);
  for (const auto& v : p0.transmission.o.values) CHECK(v == cplx{1.0, 0.0});

  const double R = 56.0, k = 2.0;
  RealImage disc(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    disc[i] = std::hypot(g.position(0, i / n), g.position(1, i % n)) < R ? 1.0 : 0.0;
  }
  RealImage delta = disc;
  const double delta0 = 1.0 / (k * 2 * R);  // peak k R delta = 1
  for (auto& v : delta.values) v *= delta0;
  const Volume dvol{delta, RealImage(g), R + 2};
  const AngleProjection pd = project_volume(dvol, 0.5, k);
  std::vector<double> phase(n), expect(n);
  for (std::size_t j = 0; j < n; ++j) {
    CHECK(std::abs(std::abs(pd.transmission.o[j]) - 1.0) <= 1e-15);
    const double x = pd.projection.phi.grid.position(0, j);
    const double chord = std::abs(x) < R ? 2.0 * std::sqrt(R * R - x * x) : 0.0;
    phase[j] = std::arg(pd.transmission.o[j]);
    expect[j] = -k * delta0 * chord;
  }
  CHECK(relative_error(phase, expect) <= 0.01);

  const Volume bvol{RealImage(g), disc, R + 2};
  const AngleProjection pb = project_volume(bvol, 1.2, k);
  for (const auto& v : pb.transmission.o.values) {
    CHECK(v.imag() == 0.0);
    CHECK(v.real() > 0.0);
    CHECK(v.real() <= 1.0);
  }
}

TEST_CASE("phase wrap validator") {
  const std::size_t n = 128;
  const Grid g = Grid::plane(n, n, 1.0);
  CHECK(check_no_phase_wrap(Volume{RealImage(g), RealImage(g), 20.0}, 1.0).max_phase == 0.0);

  const double R = 56.0, k = 1.0;
  RealImage disc(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    disc[i] = std::hypot(g.position(0, i / n), g.position(1, i % n)) < R ? 1.0 : 0.0;
  }
  const double delta0 = 0.02;
  for (auto& v : disc.values) v *= delta0;
  const PhaseWrapReport rep = check_no_phase_wrap(Volume{disc, RealImage(g), R + 2}, k);
  CHECK(std::abs(rep.max_phase - 2 * k * delta0 * R) <= 0.01 * 2 * k * delta0 * R);

  for (auto& v : disc.values) v *= 6.4 / rep.max_phase;
  try {
    check_no_phase_wrap(Volume{disc, RealImage(g), R + 2}, k);
    FAIL("expected PhaseWrapError");
  } catch (const PhaseWrapError& e) {
    CHECK(e.value() >= 2 * kPi);
    CHECK(std::abs(e.x()) <= 1.0);
  }
  CHECK_THROWS_AS(check_no_phase_wrap(Volume{disc, RealImage(g), R + 2}, k, 90), ValidationError);
}

TEST_CASE("branch-cut logarithm") {
  const Grid g = Grid::line(4, 1.0);
  ComplexField o(g, 1.0);
  o[1] = std::exp(cplx{-0.1, -1.0});
  o[2] = std::exp(cplx{0.0, -3.5});
  o[3] = std::exp(cplx{-0.2, -6.0});
  const LineIntegrals li = log_transmission(o, 1.0);
  CHECK(li.r_delta[0] == 0.0);
  CHECK(li.r_beta[0] == 0.0);
  CHECK(li.r_delta[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(li.r_beta[1] == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(li.r_delta[2] == doctest::Approx(3.5).epsilon(1e-14));
  CHECK(li.r_delta[3] == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(log_transmission(o, 2.0).r_delta[2] == doctest::Approx(1.75).epsilon(1e-14));
  // A small positive phase maps to just above -2 pi without a margin, and
  // stays near zero with one.
  ComplexField tiny(g, std::polar(1.0, 0.01));
  CHECK(log_transmission(tiny, 1.0).r_delta[0] == doctest::Approx(2 * kPi - 0.01));
  CHECK(log_transmission(tiny, 1.0, 0.25).r_delta[0] == doctest::Approx(-0.01));
  o[0] = 0.0;
  CHECK_THROWS_AS(log_transmission(o, 1.0), ZeroTransmission);
}

TEST_CASE("filtered backprojection") {
  const Grid g = Grid::plane(64, 64, 1.0);
  const Grid det = detector_for(g);
  const auto angles = uniform_angles(180);
  const Sinogram zero{angles, det, std::vector<double>(180 * 64, 0.0)};
  const RealImage z = fbp_reconstruct(zero);
  CHECK(total(z.values) == 0.0);

  RealImage f(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double y = g.position(0, i / 64), x = g.position(1, i % 64);
    const double r2 = x * x + y * y;
    f[i] = r2 < 26.0 * 26.0 ? std::exp(-r2 / (2 * 36.0)) + 0.5 * std::exp(-((x - 6) * (x - 6) + y * y) / 8.0) : 0.0;
  }
  const RealImage rec = fbp_reconstruct(radon_2d(f, angles, det));
  CHECK(relative_error(rec.values, f.values) <= 0.05);

  std::vector<double> errors;
  const RealImage phantom = add(bump(g, 0, 0, 12, 3), bump(g, 5, -4, 5, 3, 0.6));
  for (std::size_t na : {45u, 90u, 180u}) {
    const auto an = uniform_angles(na);
    errors.push_back(relative_error(fbp_reconstruct(radon_2d(phantom, an, det)).values, phantom.values));
  }
  CHECK(errors[0] > errors[1]);
  CHECK(errors[1] > errors[2]);
  CHECK(errors[2] <= 0.05);

  test::Rng rng(3);
  Sinogram s1{angles, det, test::random_real(180 * 64, rng)};
  Sinogram s2{angles, det, test::random_real(180 * 64, rng)};
  Sinogram mix{angles, det, std::vector<double>(180 * 64)};
  for (std::size_t i = 0; i < mix.values.size(); ++i) mix.values[i] = 2.0 * s1.values[i] - 0.5 * s2.values[i];
  const RealImage r1 = fbp_reconstruct(s1, {true});
  const RealImage r2 = fbp_reconstruct(s2, {true});
  const RealImage rm = fbp_reconstruct(mix, {true});
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < rm.size(); ++i) {
    err = std::max(err, std::abs(rm[i] - (2.0 * r1[i] - 0.5 * r2[i])));
    scale = std::max(scale, std::abs(rm[i]));
  }
  CHECK(err <= 1e-12 * scale);

  CHECK_THROWS_AS(fbp_reconstruct(Sinogram{{0.0}, det, std::vector<double>(64, 0.0)}), ValidationError);
  CHECK_THROWS_AS(fbp_reconstruct(Sinogram{{0.0, 0.1, 0.3}, det, std::vector<double>(192, 0.0)}), ValidationError);
}

TEST_CASE("tomographic forward model") {
  const std::size_t n = 32;
  const Grid g = Grid::plane(n, n, 1.0);
  const ImagingGeometry geom{1.0, ImagingGeometry::critical_distance(1.0, 1.0, 2 * n), 1.0, 1};
  const cplx p0{0.5, 0.5};
  const auto angles = uniform_angles(8);
  const auto flat = tomo_forward(Volume{RealImage(g), RealImage(g), 8.0}, PlaneWave{p0}, geom, angles);
  REQUIRE(flat.size() == 8);
  CHECK(flat[0].size() == 2 * n);
  for (const auto& img : flat) {
    for (double v : img.values) CHECK(std::abs(v - 0.5) <= 1e-12);
  }

  RealImage delta = bump(g, 1.0, -1.0, 7.0, 3, 0.02);
  RealImage beta = bump(g, -2.0, 0.0, 5.0, 3, 0.002);
  const Volume v{delta, beta, 10.0};
  const auto images = tomo_forward(v, PlaneWave{1.0}, geom, angles);
  for (std::size_t a = 0; a < angles.size(); ++a) {
    const AngleProjection p = project_volume(v, angles[a], geom.k);
    double in = 0.0, out = 0.0;
    for (const auto& o : pad_field(p.transmission.o, 2, 1.0).values) in += std::norm(o);
    for (double x : images[a].values) out += x;
    CHECK(std::abs(in - out) <= 1e-9 * in);
  }

  const std::vector<double> permuted{angles[3], angles[0], angles[7], angles[5]};
  const auto again = tomo_forward(v, PlaneWave{1.0}, geom, permuted);
  CHECK(again[0].values == images[3].values);
  CHECK(again[1].values == images[0].values);
  CHECK(again[2].values == images[7].values);
  CHECK(again[3].values == images[5].values);
}
