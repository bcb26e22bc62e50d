#include "doctest.h"

#include "pci/errors.hpp"
#include "pci/fourier.hpp"
#include "pci/forward.hpp"
#include "support.hpp"

#include <cmath>

using namespace pci;
using pci::test::kPi;

namespace {

Grid critical(std::size_t n) { return Grid::line(n, std::sqrt(2 * kPi / static_cast<double>(n))); }

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

}  // namespace

TEST_CASE("transmission from projection") {
  const Grid g = Grid::plane(64, 64, 1.0);
  const TransmissionFunction empty = transmission_from_projection({RealImage(g), RealImage(g)});
  for (const auto& v : empty.o.values) CHECK(v == cplx{1.0, 0.0});
  CHECK(empty.support.count(g) == 0);

  const PhaseAbsorptionProjection disc = phantom_disc(g, 10.0, 1.0, 0.1);
  const TransmissionFunction t = transmission_from_projection(disc);
  const cplx inside = std::exp(cplx{-0.1, -1.0});
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(std::abs(std::abs(t.o[i]) - std::exp(-disc.mu[i])) <= 1e-15);
    if (disc.phi[i] != 0.0) {
      CHECK(std::abs(t.o[i] - inside) <= 1e-15);
      CHECK(t.support.contains(g, i));
    } else {
      CHECK(t.o[i] == cplx{1.0, 0.0});
    }
  }
  PhaseAbsorptionProjection bad = disc;
  bad.mu[0] = -1.0;
  CHECK_THROWS_AS(transmission_from_projection(bad), ValidationError);
}

TEST_CASE("disc phantom") {
  const Grid g = Grid::plane(1024, 1024, 1.0);
  const PhaseAbsorptionProjection zero = phantom_disc(g, 0.0, 1.0, 0.1);
  CHECK(max_of(zero.phi.values) == 0.0);

  const double R = 128.0;
  const PhaseAbsorptionProjection p = phantom_disc(g, R, 1.0, 0.1);
  std::size_t count = 0;
  for (double v : p.phi.values) count += v != 0.0;
  CHECK(std::abs(static_cast<double>(count) - kPi * R * R) <= 0.01 * kPi * R * R);

  // 90 degree rotation (x, y) -> (-y, x) maps the grid onto itself away from row/column 0.
  const std::size_t n = 1024;
  bool symmetric = true;
  for (std::size_t r = 1; r < n; ++r) {
    for (std::size_t c = 1; c < n; ++c) symmetric &= p.phi[r * n + c] == p.phi[(n - c) * n + r];
  }
  CHECK(symmetric);
  CHECK_THROWS_AS(phantom_disc(g, 300.0, 1.0, 0.1), ValidationError);
  CHECK_THROWS_AS(phantom_disc(g, 10.0, 1.0, -0.1), ValidationError);

  const PhaseAbsorptionProjection soft = phantom_disc(Grid::line(64, 1.0), 8.0, 1.0, 0.0, 1.0);
  CHECK(soft.phi[32] == 1.0);
  CHECK(soft.phi[32 + 8] == doctest::Approx(0.5));
}

TEST_CASE("empty object gives the flat probe intensity") {
  const ImagingGeometry geom{1.0, 1.0, 0.25, 2};
  const Grid g = geom.physical_grid(64);
  const TransmissionFunction one{ComplexField(g, 1.0), SupportBox::centered(g, 0)};
  const cplx p0{0.6, -0.8};
  const RealImage I = holographic_intensity(one, PlaneWave{p0}, geom);
  for (double v : I.values) CHECK(std::abs(v - std::norm(p0)) <= 1e-12);
  const RealImage lin = intensity_linearized(one, PlaneWave{p0}, geom);
  for (double v : lin.values) CHECK(std::abs(v - std::norm(p0)) <= 1e-12);
}

TEST_CASE("holographic flux is conserved on the padded grid") {
  const ImagingGeometry geom{1.0, 40.0, 1.0, 2};
  const Grid g = geom.physical_grid(128);
  const TransmissionFunction o = transmission_from_projection(phantom_disc(g, 16.0, 1.0, 0.1));
  const RealImage I = holographic_intensity(o, PlaneWave{1.0}, geom, {2, false});
  const ComplexField padded = pad_field(o.o, 2, 1.0);
  double in = 0.0;
  double out = 0.0;
  for (const auto& v : padded.values) in += std::norm(v);
  for (double v : I.values) out += v;
  CHECK(std::abs(in - out) <= 1e-9 * in);
}

TEST_CASE("padding convergence of the detector window") {
  // O = 1 outside the support makes the padded result independent of the padding.
  const ImagingGeometry geom{1.0, 20.0, 1.0, 1};
  const Grid g = geom.physical_grid(256);
  // Smooth blob: its spectrum is negligible at the Nyquist frequency, so the
  // band-limited propagation kernel has no slowly decaying tails.
  PhaseAbsorptionProjection blob{RealImage(g), RealImage(g)};
  for (std::size_t j = 0; j < g.n(0); ++j) {
    const double x = g.position(0, j);
    blob.phi[j] = 0.5 * std::exp(-x * x / 50.0);
    blob.mu[j] = 0.1 * blob.phi[j];
  }
  const TransmissionFunction o = transmission_from_projection(blob);
  const RealImage a = holographic_intensity(o, PlaneWave{1.0}, geom, {2, true});
  const RealImage b = holographic_intensity(o, PlaneWave{1.0}, geom, {4, true});
  CHECK(max_abs_diff(a.values, b.values) <= 1e-8);
}

TEST_CASE("theorem operators: definitions and brute-force oracle") {
  const Grid g = critical(64);
  const SupportBox box = SupportBox::centered(g, 12);
  test::Rng rng(31);
  const Perturbation h(test::random_supported(g, box, rng), box);
  const ProbeSpec probe = PlaneWave{cplx{1.2, 0.3}};

  const RealImage F0 = operator_F(Perturbation::zero(g, box), probe, FresnelChirp{});
  for (double v : F0.values) CHECK(std::abs(v - std::norm(cplx{1.2, 0.3})) <= 1e-12);

  const RealImage F = operator_F(h, probe, FresnelChirp{});
  const RealImage Flin = operator_F_lin(h, probe, FresnelChirp{});
  const ComplexField G = scattered_spectrum(h, FresnelChirp{});
  double err = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) err = std::max(err, std::abs(F[i] - Flin[i] - std::norm(G[i])));
  CHECK(err <= 1e-12 * max_of(F.values));

  // Direct summation: |R(xi) + dx/sqrt(2pi) sum_j w(x_j) h_j e^{-i xi x_j}|^2.
  const cplx inv_gamma = std::polar(1.0, kPi / 4);
  double worst = 0.0;
  for (std::size_t l = 0; l < 64; ++l) {
    const double xi = F.grid.position(0, l);
    cplx s = 0.0;
    for (std::size_t j = 0; j < 64; ++j) {
      const double x = g.position(0, j);
      s += std::polar(1.0, 0.5 * x * x - xi * x) * h.h[j];
    }
    s *= g.spacing(0) / std::sqrt(2 * kPi);
    const cplx r = cplx{1.2, 0.3} * inv_gamma * std::polar(1.0, -0.5 * xi * xi);
    worst = std::max(worst, std::abs(F[l] - std::norm(r + s)) / std::norm(r + s));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("operator_F is nonnegative and F_lin has two consistent evaluations") {
  test::Rng rng(37);
  const Grid g = critical(128);
  double min_ratio = 0.0;
  double two_way = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const SupportBox box = SupportBox::centered(g, 2 + 2 * rng.index(30));
    const Perturbation h(test::random_supported(g, box, rng), box);
    const ProbeSpec probe = trial % 2 == 0 ? ProbeSpec{PlaneWave{rng.complex_normal()}}
                                           : ProbeSpec{GaussianBeam{rng.complex_normal(), {-0.05, -0.02}}};
    const RealImage F = operator_F(h, probe, FresnelChirp{});
    const double peak = max_of(F.values);
    for (double v : F.values) min_ratio = std::min(min_ratio, v / peak);
    const RealImage a = operator_F_lin(h, probe, FresnelChirp{});
    const RealImage b = operator_F_lin_expanded(h, probe, FresnelChirp{});
    two_way = std::max(two_way, max_abs_diff(a.values, b.values) / peak);
  }
  CHECK(min_ratio >= -1e-14);
  CHECK(two_way <= 1e-12);
}

TEST_CASE("F_lin is affine-linear for real coefficients") {
  test::Rng rng(41);
  const Grid g = critical(64);
  const SupportBox box = SupportBox::centered(g, 20);
  const ProbeSpec probe = PlaneWave{1.0};
  const Perturbation h1(test::random_supported(g, box, rng), box);
  const Perturbation h2(test::random_supported(g, box, rng), box);
  const double a = 0.7, b = -1.3;
  ComplexField mix(g);
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = a * h1.h[i] + b * h2.h[i];
  const RealImage f0 = operator_F_lin(Perturbation::zero(g, box), probe, FresnelChirp{});
  const RealImage f1 = operator_F_lin(h1, probe, FresnelChirp{});
  const RealImage f2 = operator_F_lin(h2, probe, FresnelChirp{});
  const RealImage fm = operator_F_lin(Perturbation(mix, box), probe, FresnelChirp{});
  double err = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < f0.size(); ++i) {
    const double expect = a * (f1[i] - f0[i]) + b * (f2[i] - f0[i]);
    err = std::max(err, std::abs(fm[i] - f0[i] - expect));
    scale = std::max(scale, std::abs(expect));
  }
  CHECK(err <= 1e-12 * scale);
}

TEST_CASE("quadratic remainder of the linearization") {
  test::Rng rng(43);
  const Grid g = critical(128);
  const SupportBox box = SupportBox::centered(g, 24);
  const Perturbation h(test::random_supported(g, box, rng), box);
  std::vector<double> logs_eps, logs_gap;
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
    ComplexField scaled = h.h;
    for (auto& v : scaled.values) v *= eps;
    const Perturbation he(scaled, box);
    const RealImage F = operator_F(he, PlaneWave{1.0}, FresnelChirp{});
    const RealImage L = operator_F_lin(he, PlaneWave{1.0}, FresnelChirp{});
    logs_eps.push_back(std::log10(eps));
    logs_gap.push_back(std::log10(max_abs_diff(F.values, L.values)));
  }
  for (std::size_t i = 1; i < logs_eps.size(); ++i) {
    CHECK((logs_gap[i - 1] - logs_gap[i]) / (logs_eps[i - 1] - logs_eps[i]) >= 1.9);
  }
}

TEST_CASE("physical intensities match the dimensionless operators at critical sampling") {
  const std::size_t n = 64;
  const double k = 2.0;
  const double pixel = 0.5;
  const ImagingGeometry geom{k, ImagingGeometry::critical_distance(k, pixel, 2 * n), pixel, 1};
  const Grid g = geom.physical_grid(n);
  const TransmissionFunction o = transmission_from_projection(phantom_disc(g, 6.0, 0.3, 0.03));
  const ProbeSpec probe = PlaneWave{1.0};
  const RealImage I = holographic_intensity(o, probe, geom, {2, false});
  const RealImage Ilin = intensity_linearized(o, probe, geom, {2, false});

  TransmissionFunction padded{pad_field(o.o, 2, 1.0), SupportBox{}};
  padded.support = SupportBox::whole(padded.o.grid);
  const Perturbation h = perturbation_from_transmission(padded, probe, geom);
  REQUIRE(h.h.grid.approx_equal(h.h.grid.dual(), 1e-12));
  const RealImage F = operator_F(h, probe, FresnelChirp{});
  const RealImage Flin = operator_F_lin(h, probe, FresnelChirp{});
  CHECK(max_abs_diff(I.values, F.values) <= 1e-8);
  CHECK(max_abs_diff(Ilin.values, Flin.values) <= 1e-8);
}

TEST_CASE("weak objects have a small quadratic remainder") {
  const ImagingGeometry geom{1.0, 60.0, 1.0, 2};
  const Grid g = geom.physical_grid(512);
  const TransmissionFunction o = transmission_from_projection(phantom_disc(g, 40.0, 0.01, 0.001));
  const RealImage I = holographic_intensity(o, PlaneWave{1.0}, geom);
  const RealImage L = intensity_linearized(o, PlaneWave{1.0}, geom);
  double contrast = 0.0;
  for (double v : L.values) contrast = std::max(contrast, std::abs(v - 1.0));
  CHECK(max_abs_diff(I.values, L.values) <= 0.02 * contrast);
}

TEST_CASE("flat-field normalization") {
  const ImagingGeometry geom{1.0, 1.0, std::sqrt(2 * kPi / 128), 1};
  const Grid g = geom.physical_grid(128);
  const TransmissionFunction one{ComplexField(g, 1.0), SupportBox::centered(g, 0)};

  const PlaneWave plane{cplx{0.0, 2.0}};
  const RealImage I = holographic_intensity(one, plane, geom);
  const RealImage n1 = flat_field_normalize(I, plane, geom);
  for (double v : n1.values) CHECK(std::abs(v - 1.0) <= 1e-12);
  const RealImage n2 = flat_field_normalize(n1, plane, geom);
  for (std::size_t i = 0; i < I.size(); ++i) CHECK(n2[i] == doctest::Approx(I[i] / 16.0).epsilon(1e-14));

  const GaussianBeam beam{cplx{1.0, 0.5}, cplx{-0.05, -0.02}};
  const RealImage Ig = holographic_intensity(one, beam, geom, {4, true});
  const RealImage ng = flat_field_normalize(Ig, beam, geom);
  for (double v : ng.values) CHECK(std::abs(v - 1.0) <= 1e-10);

  const GaussianBeam narrow{1.0, cplx{-5.0, 0.0}};
  CHECK_THROWS_AS(flat_field_normalize(Ig, narrow, geom), DivisionByNearZero);
}
