#pragma once

#include "pci/forward.hpp"
#include "pci/inverse.hpp"
#include "pci/optics.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace pci {

/// Largest number of real unknowns accepted for dense assembly.
inline constexpr std::size_t kDenseBudget = 4096;

/// Dense matrix of h -> T(h) on the masked data samples. Columns are the
/// real and imaginary unit perturbations of the support samples:
/// [Re h_0 .. Re h_{s-1}, Im h_0 .. Im h_{s-1}] in row-major support order.
Eigen::MatrixXd assemble_linearized_matrix(const ProbeSpec& probe, const WeightSpec& weight, const Grid& object_grid,
                                           const SupportBox& support,
                                           const std::optional<std::vector<std::uint8_t>>& mask = std::nullopt);

/// Flat indices of the support samples in the column order used above.
std::vector<std::size_t> support_indices(const Grid& grid, const SupportBox& support);
/// Stacks (Re h, Im h) over the support.
Eigen::VectorXd pack_perturbation(const Perturbation& h);

struct InjectivityReport {
  std::size_t n_unknowns = 0;
  std::size_t n_data = 0;
  std::vector<double> singular_values;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  std::size_t rank = 0;
  std::string mask;
};

void to_json(nlohmann::json& j, const InjectivityReport& r);

/// Singular spectrum and numerical rank at 1e-12 sigma_max.
InjectivityReport injectivity_probe(const Eigen::MatrixXd& A, std::string mask_description = "full");

/// Smooth Gaussian-windowed perturbation (0.3 + 0.1i) exp(-t^2 / 0.2),
/// t in [-1, 1] across the support; the object used to calibrate
/// restricted-data reconstructions.
Perturbation calibration_object(const Grid& grid, const SupportBox& support);

struct RestrictedExperimentConfig {
  ProbeSpec probe = PlaneWave{};
  WeightSpec weight = FresnelChirp{};
  Grid object_grid;
  SupportBox support;
  /// Contiguous centered data fractions, e.g. {1, 0.5, 0.25, 0.1}.
  std::vector<double> fractions{1.0, 0.5, 0.25, 0.1};
  /// Object to reconstruct; calibration_object() when empty.
  std::optional<Perturbation> object;
  SolverConfig solver{};
};

struct RestrictedResult {
  double fraction = 1.0;
  InjectivityReport report;
  double reconstruction_error = 0.0;
  ConvergenceReport convergence;
};

std::vector<RestrictedResult> restricted_data_experiment(const RestrictedExperimentConfig& cfg);

nlohmann::json restricted_json(const std::vector<RestrictedResult>& results);
/// "fraction,index,sigma" rows.
std::string spectra_csv(const std::vector<RestrictedResult>& results);

/// 1-D grid with spacing (2 pi / n)^{1/2}, which is its own dual.
Grid critical_line(std::size_t n);

}  // namespace pci
