#include "pci/inverse.hpp"

#include "pci/errors.hpp"
#include "pci/fourier.hpp"
#include "pci/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

namespace pci {

using json = nlohmann::json;

void SolverConfig::validate() const {
  if (!(reg_alpha >= 0.0) || !std::isfinite(reg_alpha)) throw ValidationError("solver: reg_alpha must be >= 0");
  if (!(cg_tol > 0.0 && cg_tol < 1.0)) throw ValidationError("solver: cg_tol must lie in (0, 1)");
  if (!(gn_step_tol > 0.0 && gn_step_tol < 1.0)) throw ValidationError("solver: gn_step_tol must lie in (0, 1)");
  if (cg_max_iter < 1 || gn_max_iter < 1) throw ValidationError("solver: iteration counts must be >= 1");
}

void to_json(json& j, const SolverConfig& c) {
  j = json{{"reg_alpha", c.reg_alpha},
           {"cg_max_iter", c.cg_max_iter},
           {"cg_tol", c.cg_tol},
           {"gn_max_iter", c.gn_max_iter},
           {"gn_step_tol", c.gn_step_tol}};
}

void from_json(const json& j, SolverConfig& c) {
  c.reg_alpha = j.value("reg_alpha", c.reg_alpha);
  c.cg_max_iter = j.value("cg_max_iter", c.cg_max_iter);
  c.cg_tol = j.value("cg_tol", c.cg_tol);
  c.gn_max_iter = j.value("gn_max_iter", c.gn_max_iter);
  c.gn_step_tol = j.value("gn_step_tol", c.gn_step_tol);
}

void to_json(json& j, const ConvergenceReport& r) {
  j = json{{"iterations", r.iterations},
           {"outer_iterations", r.outer_iterations},
           {"converged", r.converged},
           {"final_residual", r.final_residual},
           {"final_reg_alpha", r.final_reg_alpha},
           {"residual_history", r.residual_history},
           {"objective_history", r.objective_history},
           {"misfit_history", r.misfit_history}};
}

namespace {

// Real-linear map h -> 2 Re(conj(Q) F(w h)) from the support of the object
// grid to the masked samples of its dual grid.
class LinearModel {
public:
  LinearModel(const Grid& object_grid, const SupportBox& support, ComplexField w, ComplexField q,
              std::optional<std::vector<std::uint8_t>> mask)
      : object_(object_grid), support_(support), w_(std::move(w)), q_(std::move(q)), mask_(std::move(mask)) {
    support_.validate(object_);
    if (!q_.grid.approx_equal(object_.dual(), 1e-9)) {
      throw ValidationError("data grid is not the dual of the object grid");
    }
    if (mask_ && mask_->size() != q_.size()) throw ValidationError("mask does not match the data grid");
    if (mask_ && std::none_of(mask_->begin(), mask_->end(), [](auto v) { return v != 0; })) {
      throw ValidationError("data mask is empty");
    }
  }

  const Grid& object_grid() const { return object_; }
  const Grid& data_grid() const { return q_.grid; }
  const SupportBox& support() const { return support_; }

  bool in_mask(std::size_t i) const { return !mask_ || (*mask_)[i] != 0; }

  std::vector<double> apply(const ComplexField& h) const {
    ComplexField wh(object_);
    for (std::size_t i = 0; i < wh.size(); ++i) wh[i] = support_.contains(object_, i) ? w_[i] * h[i] : 0.0;
    const ComplexField g = fourier_transform(wh);
    std::vector<double> out(g.size(), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (in_mask(i)) out[i] = 2.0 * (std::conj(q_[i]) * g[i]).real();
    }
    return out;
  }

  ComplexField adjoint(const std::vector<double>& r) const {
    ComplexField y(q_.grid);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = in_mask(i) ? q_[i] * r[i] : 0.0;
    ComplexField x = inverse_fourier_transform(y);
    x.grid = object_;
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = support_.contains(object_, i) ? 2.0 * std::conj(w_[i]) * x[i] : 0.0;
    }
    return x;
  }

  double dot_object(const ComplexField& a, const ComplexField& b) const {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (std::conj(a[i]) * b[i]).real();
    return s * object_.cell_measure();
  }

  double dot_data(const std::vector<double>& a, const std::vector<double>& b) const {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (in_mask(i)) s += a[i] * b[i];
    }
    return s * q_.grid.cell_measure();
  }

private:
  Grid object_;
  SupportBox support_;
  ComplexField w_;
  ComplexField q_;
  std::optional<std::vector<std::uint8_t>> mask_;
};

void axpy(ComplexField& y, double a, const ComplexField& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

// CGLS on min ||A x - b||^2 + alpha ||x||^2. Appends to `report`.
ComplexField cgls(const LinearModel& A, const std::vector<double>& b, double alpha, const SolverConfig& cfg,
                  ConvergenceReport& report) {
  ComplexField x(A.object_grid());
  std::vector<double> r = b;
  ComplexField s = A.adjoint(r);
  ComplexField p = s;
  double gamma = A.dot_object(s, s);
  const double s0 = std::sqrt(gamma);
  report.final_reg_alpha = alpha;
  if (s0 == 0.0) {
    report.final_residual = 0.0;
    report.converged = true;
    return x;
  }

  double objective = A.dot_data(r, r);
  int rising = 0;
  bool converged = false;
  double rel = 1.0;
  for (int it = 0; it < cfg.cg_max_iter; ++it) {
    const std::vector<double> q = A.apply(p);
    const double delta = A.dot_data(q, q) + alpha * A.dot_object(p, p);
    if (!(delta > 0.0)) break;
    const double a = gamma / delta;
    axpy(x, a, p);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= a * q[i];
    s = A.adjoint(r);
    axpy(s, -alpha, x);
    const double gamma_new = A.dot_object(s, s);
    rel = std::sqrt(gamma_new) / s0;
    ++report.iterations;
    report.residual_history.push_back(rel);

    const double objective_new = A.dot_data(r, r) + alpha * A.dot_object(x, x);
    report.objective_history.push_back(objective_new);
    rising = objective_new > objective * (1.0 + 1e-12) ? rising + 1 : 0;
    if (rising >= 10) throw SolverError("CG diverged: Tikhonov functional increased for 10 iterations");
    objective = objective_new;

    if (rel <= cfg.cg_tol) {
      converged = true;
      break;
    }
    const double beta = gamma_new / gamma;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = s[i] + beta * p[i];
    gamma = gamma_new;
  }
  report.final_residual = rel;
  report.converged = converged;
  return x;
}

ComplexField support_values(const Perturbation& p) {
  ComplexField v = p.h;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!p.support.contains(v.grid, i)) v[i] = 0.0;
  }
  return v;
}

const std::optional<std::vector<std::uint8_t>>& mask_of(const RealImage& r) { return r.mask; }

LinearModel linear_model(const ProbeSpec& probe, const WeightSpec& weight, const Grid& object_grid,
                         const SupportBox& support, std::optional<std::vector<std::uint8_t>> mask) {
  validate(weight);
  ComplexField w = weight_field(weight, object_grid);
  ComplexField r = reference_term(probe, object_grid.dual());
  return LinearModel(object_grid, support, std::move(w), std::move(r), std::move(mask));
}

LinearModel gauss_newton_model(const Perturbation& h, const ProbeSpec& probe, const WeightSpec& weight,
                               std::optional<std::vector<std::uint8_t>> mask) {
  const ComplexField g = scattered_spectrum(h, weight);
  ComplexField q = reference_term(probe, g.grid);
  for (std::size_t i = 0; i < q.size(); ++i) q[i] += g[i];
  return LinearModel(h.h.grid, h.support, weight_field(weight, h.h.grid), std::move(q), std::move(mask));
}

RealImage as_image(const Grid& grid, std::vector<double> v) { return RealImage(grid, std::move(v)); }

}  // namespace

RealImage flin_jacobian_apply(const Perturbation& dh, const ProbeSpec& probe, const WeightSpec& weight) {
  const LinearModel A = linear_model(probe, weight, dh.h.grid, dh.support, std::nullopt);
  return as_image(A.data_grid(), A.apply(dh.h));
}

Perturbation flin_jacobian_adjoint(const RealImage& r, const ProbeSpec& probe, const WeightSpec& weight,
                                   const Grid& object_grid, const SupportBox& support) {
  r.validate();
  const LinearModel A = linear_model(probe, weight, object_grid, support, mask_of(r));
  return Perturbation(A.adjoint(r.values), support);
}

RealImage nonlinear_jacobian_apply(const Perturbation& h, const Perturbation& dh, const ProbeSpec& probe,
                                   const WeightSpec& weight) {
  if (!(h.h.grid == dh.h.grid)) throw ValidationError("jacobian: h and dh live on different grids");
  const LinearModel A = gauss_newton_model(Perturbation(h.h, dh.support), probe, weight, std::nullopt);
  return as_image(A.data_grid(), A.apply(dh.h));
}

Perturbation nonlinear_jacobian_adjoint(const Perturbation& h, const RealImage& r, const ProbeSpec& probe,
                                        const WeightSpec& weight) {
  r.validate();
  const LinearModel A = gauss_newton_model(h, probe, weight, mask_of(r));
  return Perturbation(A.adjoint(r.values), h.support);
}

Reconstruction reconstruct_linear(const RealImage& data, const ProbeSpec& probe, const WeightSpec& weight,
                                  const Grid& object_grid, const SupportBox& support, const SolverConfig& cfg) {
  cfg.validate();
  data.validate();
  const LinearModel A = linear_model(probe, weight, object_grid, support, data.mask);
  const ComplexField r = reference_term(probe, A.data_grid());
  std::vector<double> b(data.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (A.in_mask(i)) b[i] = data[i] - std::norm(r[i]);
  }
  Reconstruction out;
  ComplexField h = cgls(A, b, cfg.reg_alpha, cfg, out.report);
  out.report.outer_iterations = 1;
  out.h = Perturbation(std::move(h), support);
  return out;
}

Reconstruction reconstruct_nonlinear(const RealImage& data, const ProbeSpec& probe, const WeightSpec& weight,
                                     const Perturbation& init, const SolverConfig& cfg) {
  cfg.validate();
  data.validate();
  init.h.validate();
  const ComplexField h0 = support_values(init);
  Perturbation h(h0, init.support);
  double alpha = cfg.reg_alpha;
  double data_norm = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.in_mask(i)) data_norm += data[i] * data[i];
  }
  data_norm = std::sqrt(data_norm * data.grid.cell_measure());

  Reconstruction out;
  int stalled = 0;
  for (int it = 0; it < cfg.gn_max_iter; ++it) {
    const LinearModel J = gauss_newton_model(h, probe, weight, data.mask);
    const RealImage current = operator_F(h, probe, weight);
    std::vector<double> residual(data.size(), 0.0);
    for (std::size_t i = 0; i < residual.size(); ++i) {
      if (J.in_mask(i)) residual[i] = data[i] - current[i];
    }
    const double misfit = std::sqrt(J.dot_data(residual, residual));
    // Inner solves are only accurate to cg_tol; below this the misfit is noise.
    const double floor = std::max(cfg.cg_tol, 1e-12) * data_norm;
    if (!out.report.misfit_history.empty() && misfit >= out.report.misfit_history.back() && misfit > floor) {
      if (++stalled >= 5) throw SolverError("Gauss-Newton stagnated: misfit did not decrease for 5 steps");
    } else {
      stalled = 0;
    }
    out.report.misfit_history.push_back(misfit);
    if (misfit <= floor) {
      out.report.converged = true;
      break;
    }

    // Solve for u = h + dh - h0 so the penalty ||h + dh - h0|| is a plain
    // Tikhonov term.
    ComplexField offset = h.h;
    axpy(offset, -1.0, h0);
    std::vector<double> b = J.apply(offset);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] += residual[i];
    ConvergenceReport inner;
    ComplexField u = cgls(J, b, alpha, cfg, inner);
    out.report.iterations += inner.iterations;
    out.report.final_residual = inner.final_residual;
    out.report.residual_history.insert(out.report.residual_history.end(), inner.residual_history.begin(),
                                       inner.residual_history.end());
    out.report.objective_history.insert(out.report.objective_history.end(), inner.objective_history.begin(),
                                        inner.objective_history.end());

    ComplexField dh = u;
    axpy(dh, -1.0, offset);
    axpy(h.h, 1.0, dh);
    out.report.outer_iterations = it + 1;
    out.report.final_reg_alpha = alpha;

    const double step = l2_norm(dh.values);
    const double size = l2_norm(h.h.values);
    if (step == 0.0 || step <= cfg.gn_step_tol * size) {
      out.report.converged = true;
      break;
    }
    alpha = std::max(alpha / 2.0, 1e-14);
  }
  out.h = Perturbation(h.h, h.support);
  return out;
}

TransmissionFunction recover_object(const Perturbation& h, const ProbeSpec& probe) {
  h.h.validate();
  const ComplexField p = probe_field(probe, h.h.grid);
  double pmax = 0.0;
  double pmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!h.support.contains(h.h.grid, i)) continue;
    pmax = std::max(pmax, std::abs(p[i]));
    pmin = std::min(pmin, std::abs(p[i]));
  }
  if (!(pmin >= 1e-14 * pmax) || pmax == 0.0) {
    throw ProbeZero("probe vanishes on the support; o = 1 + h/p is undefined");
  }
  TransmissionFunction o{ComplexField(h.h.grid, cplx{1.0, 0.0}), h.support};
  for (std::size_t i = 0; i < o.o.size(); ++i) {
    if (h.support.contains(h.h.grid, i)) o.o[i] = 1.0 + h.h[i] / p[i];
  }
  return o;
}

TomoReconstruction tomo_reconstruct(const std::vector<RealImage>& images, const ProbeSpec& probe,
                                    const ImagingGeometry& geom, const std::vector<double>& angles,
                                    const SolverConfig& cfg, const TomoReconOptions& options) {
  cfg.validate();
  geom.validate();
  if (geom.m != 1) throw ValidationError("tomo_reconstruct works with m = 1 projections");
  if (images.size() != angles.size()) throw ValidationError("tomo_reconstruct: one image per angle required");
  if (angles.size() < 2) throw ValidationError("tomo_reconstruct needs at least 2 angles");
  const Grid detector = images.front().grid;
  for (const auto& img : images) {
    img.validate();
    if (!(img.grid == detector)) throw ValidationError("tomo_reconstruct: images on different grids");
  }
  if (detector.ndim() != 1) throw ValidationError("tomo_reconstruct: images must be 1-D detector rows");
  const Grid dimless = geom.dimensionless(detector);
  if (!dimless.approx_equal(dimless.dual(), 1e-9)) {
    throw ValidationError("tomo_reconstruct needs critically sampled data, k pixel^2 / d = 2 pi / n");
  }

  const std::size_t n = options.volume_n != 0 ? options.volume_n : detector.n(0) / 2;
  if (n > detector.n(0) || n % 2 != 0) throw ValidationError("tomo_reconstruct: bad volume size");
  const Grid volume_detector = Grid::line(n, geom.pixel);
  const double radius =
      options.support_radius > 0.0 ? options.support_radius : 0.25 * static_cast<double>(n) * geom.pixel;
  const auto half = static_cast<std::size_t>(std::ceil(radius / geom.pixel - 1e-9));
  if (2 * half > n) throw ValidationError("tomo_reconstruct: support radius exceeds the volume");
  const SupportBox support = SupportBox::centered(dimless, 2 * half);

  TomoReconstruction out;
  out.reports.resize(angles.size());
  const std::size_t na = angles.size();
  std::vector<double> rd(na * n);
  std::vector<double> rb(na * n);
  constexpr double kTwoPi = 2.0 * std::numbers::pi;

  parallel_for(na, [&](std::size_t a) {
    RealImage data(dimless, images[a].values);
    data.mask = images[a].mask;
    Reconstruction rec = options.nonlinear
                             ? reconstruct_nonlinear(data, probe, FresnelChirp{}, Perturbation::zero(dimless, support), cfg)
                             : reconstruct_linear(data, probe, FresnelChirp{}, dimless, support, cfg);
    out.reports[a] = rec.report;
    const TransmissionFunction o = recover_object(rec.h, probe);
    ComplexField window = crop_field(ComplexField(detector, o.o.values), volume_detector);
    for (std::size_t j = 0; options.check_branch && j < n; ++j) {
      double phase = std::arg(window[j]);
      if (phase > options.branch_margin) phase -= kTwoPi;
      const double lower = -kTwoPi + options.branch_margin;
      if (phase - lower < 1e-6 || options.branch_margin - phase < 1e-6) {
        throw PhaseWrapError("recovered phase at the branch boundary", angles[a], volume_detector.position(0, j),
                             -phase);
      }
    }
    const LineIntegrals li = log_transmission(window, geom.k, options.branch_margin);
    std::copy(li.r_delta.begin(), li.r_delta.end(), rd.begin() + static_cast<long>(a * n));
    std::copy(li.r_beta.begin(), li.r_beta.end(), rb.begin() + static_cast<long>(a * n));
  });

  out.r_delta = Sinogram{angles, volume_detector, std::move(rd)};
  out.r_beta = Sinogram{angles, volume_detector, std::move(rb)};
  RealImage delta = fbp_reconstruct(out.r_delta, options.fbp);
  RealImage beta = fbp_reconstruct(out.r_beta, options.fbp);

  // The support disc is known a priori; beta >= 0 is physical.
  const Grid& g = delta.grid;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = std::hypot(g.position(0, i / g.n(1)), g.position(1, i % g.n(1)));
    if (r >= radius) {
      delta[i] = 0.0;
      beta[i] = 0.0;
    }
    beta[i] = std::max(beta[i], 0.0);
  }
  out.volume = Volume{std::move(delta), std::move(beta), radius};
  return out;
}

}  // namespace pci
