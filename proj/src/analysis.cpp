#include "pci/analysis.hpp"

#include "pci/errors.hpp"
#include "pci/parallel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace pci {

using json = nlohmann::json;

std::vector<std::size_t> support_indices(const Grid& grid, const SupportBox& support) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (support.contains(grid, i)) idx.push_back(i);
  }
  return idx;
}

Eigen::VectorXd pack_perturbation(const Perturbation& h) {
  const auto idx = support_indices(h.h.grid, h.support);
  const auto s = static_cast<Eigen::Index>(idx.size());
  Eigen::VectorXd v(2 * s);
  for (Eigen::Index j = 0; j < s; ++j) {
    v(j) = h.h[idx[static_cast<std::size_t>(j)]].real();
    v(s + j) = h.h[idx[static_cast<std::size_t>(j)]].imag();
  }
  return v;
}

Eigen::MatrixXd assemble_linearized_matrix(const ProbeSpec& probe, const WeightSpec& weight, const Grid& object_grid,
                                           const SupportBox& support,
                                           const std::optional<std::vector<std::uint8_t>>& mask) {
  support.validate(object_grid);
  const auto idx = support_indices(object_grid, support);
  const std::size_t n_unknowns = 2 * idx.size();
  if (n_unknowns > kDenseBudget) {
    throw BudgetError("dense assembly needs " + std::to_string(n_unknowns) + " real unknowns, budget is " +
                      std::to_string(kDenseBudget));
  }
  const Grid data_grid = object_grid.dual();
  if (mask && mask->size() != data_grid.size()) throw ValidationError("mask does not match the data grid");
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < data_grid.size(); ++i) {
    if (!mask || (*mask)[i] != 0) rows.push_back(i);
  }
  if (rows.empty()) throw ValidationError("data mask is empty");

  Eigen::MatrixXd A(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n_unknowns));
  parallel_for(n_unknowns, [&](std::size_t col) {
    ComplexField e(object_grid);
    const bool imag = col >= idx.size();
    e[idx[imag ? col - idx.size() : col]] = imag ? cplx{0.0, 1.0} : cplx{1.0, 0.0};
    const RealImage t = flin_jacobian_apply(Perturbation(std::move(e), support), probe, weight);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)) = t[rows[r]];
    }
  });
  return A;
}

void to_json(json& j, const InjectivityReport& r) {
  j = json{{"n_unknowns", r.n_unknowns}, {"n_data", r.n_data},       {"rank", r.rank},
           {"sigma_min", r.sigma_min},   {"sigma_max", r.sigma_max}, {"rank_threshold_rel", 1e-12},
           {"mask", r.mask},             {"singular_values", r.singular_values}};
}

InjectivityReport injectivity_probe(const Eigen::MatrixXd& A, std::string mask_description) {
  if (A.size() == 0) throw ValidationError("injectivity probe: empty matrix");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A);
  if (svd.info() != Eigen::Success) throw Error("SVD failed");
  const Eigen::VectorXd& s = svd.singularValues();
  InjectivityReport rep;
  rep.n_unknowns = static_cast<std::size_t>(A.cols());
  rep.n_data = static_cast<std::size_t>(A.rows());
  rep.singular_values.assign(s.data(), s.data() + s.size());
  rep.sigma_max = s.size() > 0 ? s(0) : 0.0;
  // Missing singular values (fewer rows than columns) are zero.
  rep.sigma_min = static_cast<std::size_t>(s.size()) < rep.n_unknowns ? 0.0 : s(s.size() - 1);
  const double threshold = 1e-12 * rep.sigma_max;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > threshold) ++rep.rank;
  }
  rep.mask = std::move(mask_description);
  return rep;
}

Perturbation calibration_object(const Grid& grid, const SupportBox& support) {
  const auto idx = support_indices(grid, support);
  if (grid.ndim() != 1) throw ValidationError("calibration object is defined on 1-D grids");
  ComplexField h(grid);
  const std::size_t count = idx.size();
  for (std::size_t j = 0; j < count; ++j) {
    const double t = count > 1 ? -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(count - 1) : 0.0;
    h[idx[j]] = std::exp(-t * t / 0.2) * cplx{0.3, 0.1};
  }
  return Perturbation(std::move(h), support);
}

Grid critical_line(std::size_t n) {
  return Grid::line(n, std::sqrt(2.0 * std::numbers::pi / static_cast<double>(n)));
}

std::vector<RestrictedResult> restricted_data_experiment(const RestrictedExperimentConfig& cfg) {
  cfg.solver.validate();
  const Perturbation object = cfg.object ? *cfg.object : calibration_object(cfg.object_grid, cfg.support);
  const RealImage full = operator_F_lin(object, cfg.probe, cfg.weight);

  std::vector<RestrictedResult> results(cfg.fractions.size());
  parallel_for(cfg.fractions.size(), [&](std::size_t k) {
    const double fraction = cfg.fractions[k];
    std::optional<std::vector<std::uint8_t>> mask;
    if (fraction < 1.0) mask = centered_mask(full.grid, fraction);
    std::ostringstream desc;
    desc << "centered contiguous " << fraction * 100.0 << "%";

    RestrictedResult res;
    res.fraction = fraction;
    const Eigen::MatrixXd A = assemble_linearized_matrix(cfg.probe, cfg.weight, cfg.object_grid, cfg.support, mask);
    res.report = injectivity_probe(A, desc.str());

    RealImage data = full;
    data.mask = mask;
    const Reconstruction rec = reconstruct_linear(data, cfg.probe, cfg.weight, cfg.object_grid, cfg.support, cfg.solver);
    res.reconstruction_error = relative_error(rec.h.h.values, object.h.values);
    res.convergence = rec.report;
    results[k] = std::move(res);
  });
  return results;
}

json restricted_json(const std::vector<RestrictedResult>& results) {
  json arr = json::array();
  for (const auto& r : results) {
    arr.push_back(json{{"fraction", r.fraction},
                       {"report", r.report},
                       {"reconstruction_error", r.reconstruction_error},
                       {"cg_iterations", r.convergence.iterations},
                       {"cg_converged", r.convergence.converged}});
  }
  return arr;
}

std::string spectra_csv(const std::vector<RestrictedResult>& results) {
  std::ostringstream out;
  out.precision(17);
  out << "fraction,index,sigma\n";
  for (const auto& r : results) {
    for (std::size_t i = 0; i < r.report.singular_values.size(); ++i) {
      out << r.fraction << ',' << i << ',' << r.report.singular_values[i] << '\n';
    }
  }
  return out.str();
}

}  // namespace pci
