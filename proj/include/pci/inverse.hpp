#pragma once

#include "pci/forward.hpp"
#include "pci/optics.hpp"
#include "pci/tomo.hpp"

#include <json.hpp>

#include <vector>

namespace pci {

struct SolverConfig {
  /// Tikhonov weight; for Gauss-Newton the starting weight, halved every
  /// outer iteration down to 1e-14.
  double reg_alpha = 1e-8;
  int cg_max_iter = 2000;
  /// Relative normal-equation residual at which CG stops.
  double cg_tol = 1e-10;
  int gn_max_iter = 60;
  double gn_step_tol = 1e-10;

  void validate() const;
};

void to_json(nlohmann::json& j, const SolverConfig& c);
/// Missing keys keep their defaults.
void from_json(const nlohmann::json& j, SolverConfig& c);

struct ConvergenceReport {
  int iterations = 0;           // CG iterations (summed over outer iterations for Gauss-Newton)
  int outer_iterations = 0;     // Gauss-Newton steps
  bool converged = false;
  double final_residual = 0.0;  // relative normal-equation residual of the last CG solve
  double final_reg_alpha = 0.0;
  std::vector<double> residual_history;  // CG normal residual per iteration
  std::vector<double> objective_history;  // Tikhonov functional per CG iteration
  std::vector<double> misfit_history;     // data misfit per Gauss-Newton step
};

void to_json(nlohmann::json& j, const ConvergenceReport& r);

struct Reconstruction {
  Perturbation h;
  ConvergenceReport report;
};

/// T(dh) = 2 Re(conj(R) F(w dh)) on the dual of the object grid.
RealImage flin_jacobian_apply(const Perturbation& dh, const ProbeSpec& probe, const WeightSpec& weight);

/// T^T(r) = 2 conj(w) F^{-1}(R r), restricted to `support`. Samples of r
/// outside its mask are treated as zero.
Perturbation flin_jacobian_adjoint(const RealImage& r, const ProbeSpec& probe, const WeightSpec& weight,
                                   const Grid& object_grid, const SupportBox& support);

/// dF[h](dh) = 2 Re(conj(R + F(w h)) F(w dh)).
RealImage nonlinear_jacobian_apply(const Perturbation& h, const Perturbation& dh, const ProbeSpec& probe,
                                   const WeightSpec& weight);
Perturbation nonlinear_jacobian_adjoint(const Perturbation& h, const RealImage& r, const ProbeSpec& probe,
                                        const WeightSpec& weight);

/// Tikhonov-regularized CGLS for min ||M (T h - (I_lin - |R|^2))||^2 + alpha ||h||^2.
/// `data` lives on the dual of `object_grid`; its mask selects U.
Reconstruction reconstruct_linear(const RealImage& data, const ProbeSpec& probe, const WeightSpec& weight,
                                  const Grid& object_grid, const SupportBox& support, const SolverConfig& cfg);

/// Iteratively regularized Gauss-Newton for F(h) = data, penalizing
/// ||h - init||; `init` fixes the object grid and support.
Reconstruction reconstruct_nonlinear(const RealImage& data, const ProbeSpec& probe, const WeightSpec& weight,
                                     const Perturbation& init, const SolverConfig& cfg);

/// o = 1 + h / p with p the object-plane probe on h's (dimensionless) grid.
TransmissionFunction recover_object(const Perturbation& h, const ProbeSpec& probe);

struct TomoReconOptions {
  bool nonlinear = false;
  /// Support disc radius in physical units; 0 selects a quarter of the
  /// volume extent.
  double support_radius = 0.0;
  /// Volume samples per axis; 0 selects half the detector length.
  std::size_t volume_n = 0;
  double branch_margin = 0.25;
  /// Raise PhaseWrapError when a recovered phase sits on the branch boundary.
  bool check_branch = true;
  FbpOptions fbp{};
};

struct TomoReconstruction {
  Volume volume;
  Sinogram r_delta;
  Sinogram r_beta;
  std::vector<ConvergenceReport> reports;
};

/// Per-angle retrieval, o = 1 + h/p, branch-cut logarithm and FBP of the
/// real and imaginary line integrals. Images are critically sampled
/// physical detector rows.
TomoReconstruction tomo_reconstruct(const std::vector<RealImage>& images, const ProbeSpec& probe,
                                    const ImagingGeometry& geom, const std::vector<double>& angles,
                                    const SolverConfig& cfg, const TomoReconOptions& options = {});

}  // namespace pci
