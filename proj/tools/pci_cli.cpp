// pci: command-line driver for the phase contrast imaging library.
//
// Exit codes: 0 ok, 2 validation or budget, 3 aliasing, 4 solver, 5 phase wrap.

#include "config.hpp"

#include "pci/analysis.hpp"
#include "pci/errors.hpp"
#include "pci/field_io.hpp"
#include "pci/forward.hpp"
#include "pci/fourier.hpp"
#include "pci/inverse.hpp"
#include "pci/optics.hpp"
#include "pci/tomo.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>

namespace fs = std::filesystem;
using namespace pci;
using json = nlohmann::json;

namespace {

struct Global {
  std::string out = ".";
  std::uint64_t seed = 0;
  bool quiet = false;

  fs::path path(const std::string& name) const { return fs::path(out) / name; }
};

Global global;

void say(const std::string& line) {
  if (!global.quiet) std::cout << line << '\n';
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

void add_solver_options(CLI::App* cmd, SolverConfig& cfg) {
  cmd->add_option("--reg-alpha", cfg.reg_alpha, "Tikhonov weight (Gauss-Newton: starting weight)");
  cmd->add_option("--cg-max-iter", cfg.cg_max_iter, "CG iteration limit");
  cmd->add_option("--cg-tol", cfg.cg_tol, "relative normal-equation residual to stop CG");
  cmd->add_option("--gn-max-iter", cfg.gn_max_iter, "Gauss-Newton iteration limit");
  cmd->add_option("--gn-step-tol", cfg.gn_step_tol, "relative step size to stop Gauss-Newton");
}

void add_probe_options(CLI::App* cmd, cli::ProbeArgs& probe) {
  cmd->add_option("--probe", probe.type, "probe model")->check(CLI::IsMember({"plane", "gaussian"}));
  cmd->add_option("--p0", probe.p0, "probe amplitude re,im");
  cmd->add_option("--alpha0", probe.alpha0, "Gaussian exponent re,im (Re < 0, Im <= 0)");
}

bool probe_given(const CLI::App* cmd) {
  return cmd->count("--probe") + cmd->count("--p0") + cmd->count("--alpha0") > 0;
}

json support_json(const SupportBox& b) { return {{"begin", b.begin}, {"end", b.end}}; }

SupportBox support_from(const json& j, const Grid& grid) {
  if (!j.contains("support")) return SupportBox::whole(grid);
  SupportBox b;
  b.begin = j.at("support").at("begin").get<std::array<std::size_t, 2>>();
  b.end = j.at("support").at("end").get<std::array<std::size_t, 2>>();
  if (b.count(grid) == 0) return SupportBox::whole(grid);
  b.validate(grid);
  return b;
}

// ---------------------------------------------------------------- phantom

struct PhantomArgs {
  bool disc = true;
  std::size_t n = 1024;
  int dim = 2;
  double radius_frac = 0.125;
  double phi = 1.0;
  double mu = 0.1;
  double edge = 0.0;
  double pixel = 1.0;
  std::string name = "phantom";
};

void run_phantom(const PhantomArgs& a) {
  if (!std::isfinite(a.phi)) throw ValidationError("phi must be finite");
  if (!(a.mu >= 0.0) || !std::isfinite(a.mu)) throw ValidationError("mu must be >= 0");
  if (a.dim != 1 && a.dim != 2) throw ValidationError("--dim must be 1 or 2");
  if (!(a.radius_frac > 0.0 && a.radius_frac <= 0.25)) {
    throw ValidationError("--radius-frac must lie in (0, 0.25] so the disc keeps a margin of R");
  }
  const Grid g = a.dim == 1 ? Grid::line(a.n, a.pixel) : Grid::plane(a.n, a.n, a.pixel);
  const double radius = a.radius_frac * static_cast<double>(a.n) * a.pixel;
  const PhaseAbsorptionProjection p = phantom_disc(g, radius, a.phi, a.mu, a.edge);
  const TransmissionFunction o = transmission_from_projection(p);

  const json meta{{"kind", "disc"}, {"radius", radius}, {"phi", a.phi},
                  {"mu", a.mu},     {"edge_width", a.edge}, {"support", support_json(o.support)}};
  io::write_field(global.path(a.name + "_o.hfld"), o.o, meta);
  io::write_field(global.path(a.name + "_phi.hfld"), p.phi, meta);
  io::write_field(global.path(a.name + "_mu.hfld"), p.mu, meta);
  const auto scaling = io::write_pgm(global.path(a.name + "_phi.pgm"), p.phi);
  write_json(global.path(a.name + "_phi.pgm.json"), io::scaling_json(scaling));
  say("phantom: disc R = " + fmt(radius) + " on " + std::to_string(a.n) + (a.dim == 2 ? "^2" : "") +
      " samples -> " + global.path(a.name + "_o.hfld").string());
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string object;
  double k = 1.0;
  double d = 0.0;
  double fresnel = 0.0;
  double radius = 0.0;
  bool critical = false;
  cli::ProbeArgs probe;
  int pad = 2;
  bool far_field = false;
  double noise = 0.0;
  bool linearized = false;
  std::string name = "intensity";
};

void run_simulate(const SimulateArgs& a) {
  const io::FieldFile file = io::read_file(a.object);
  const ComplexField o = io::read_complex_field(a.object);
  const Grid& g = o.grid;
  const int distance_choices = (a.d > 0.0) + (a.fresnel > 0.0) + a.critical;
  if (distance_choices != 1) throw ValidationError("give exactly one of --d, --fresnel-caption, --critical");
  if (a.pad < 1) throw ValidationError("--pad must be >= 1");
  if (!(a.noise >= 0.0)) throw ValidationError("--noise-sigma must be >= 0");

  const double radius = a.radius > 0.0 ? a.radius : file.sidecar.value("radius", 0.0);
  ImagingGeometry geom{a.k, 1.0, g.spacing(0), g.ndim()};
  if (a.d > 0.0) geom.d = a.d;
  if (a.fresnel > 0.0) {
    if (!(radius > 0.0)) throw ValidationError("--fresnel-caption needs --radius or an object sidecar with radius");
    geom.d = ImagingGeometry::distance_from_fresnel(a.fresnel, a.k, radius);
  }
  if (a.critical) {
    geom.d = ImagingGeometry::critical_distance(a.k, g.spacing(0), g.n(0) * static_cast<std::size_t>(a.pad));
  }
  geom.validate();
  const ProbeSpec probe = a.probe.spec();
  const TransmissionFunction t{o, support_from(file.sidecar, g)};
  const HolographyOptions hopt{a.pad, !a.critical};

  RealImage img = a.linearized ? intensity_linearized(t, probe, geom, hopt) : holographic_intensity(t, probe, geom, hopt);
  if (a.noise > 0.0) {
    std::mt19937_64 gen(global.seed);
    std::normal_distribution<double> noise(0.0, a.noise);
    for (auto& v : img.values) v += noise(gen);
  }

  json meta{{"kind", a.linearized ? "linearized_intensity" : "intensity"},
            {"geometry", cli::geometry_json(geom)},
            {"probe", cli::probe_json(probe)},
            {"pad", a.pad},
            {"cropped", !a.critical},
            {"noise_sigma", a.noise},
            {"seed", global.seed},
            {"object", a.object}};
  if (radius > 0.0) meta["fresnel_caption"] = 2.0 * std::numbers::pi * geom.d / (geom.k * radius * radius);
  if (a.critical) {
    // The object window sits in the middle of the padded detector.
    const Grid dimless = geom.dimensionless(img.grid);
    SupportBox box = t.support;
    if (box.count(g) == 0 || box.count(g) == g.size()) box = SupportBox::whole(g);
    const std::size_t off = (img.grid.n(0) - g.n(0)) / 2;
    for (int ax = 0; ax < g.ndim(); ++ax) {
      box.begin[static_cast<std::size_t>(ax)] += off;
      box.end[static_cast<std::size_t>(ax)] += off;
    }
    box.validate(dimless);
    meta["support"] = support_json(box);
  }
  const auto scaling = io::write_pgm(global.path(a.name + ".pgm"), img);
  meta["pgm_scaling"] = io::scaling_json(scaling);
  io::write_field(global.path(a.name + ".hfld"), img, meta);
  say("simulate: d = " + fmt(geom.d) + " -> " + global.path(a.name + ".hfld").string());

  if (a.far_field) {
    const Grid padded_dimless = geom.dimensionless(a.pad > 1 ? pad_field(o, a.pad, 1.0).grid : g);
    ComplexField psi = pad_field(o, a.pad, 1.0);
    psi.grid = padded_dimless;
    const ComplexField p = probe_field(probe, padded_dimless);
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= p[i];
    const RealImage ff = far_field_intensity(psi);
    const auto ffs = io::write_pgm(global.path(a.name + "_far_field.pgm"), ff, true);
    io::write_field(global.path(a.name + "_far_field.hfld"), ff,
                    {{"kind", "far_field"}, {"pgm_scaling", io::scaling_json(ffs)}, {"probe", cli::probe_json(probe)}});
    say("simulate: far field (log10 PGM) -> " + global.path(a.name + "_far_field.pgm").string());
  }
}

// ---------------------------------------------------------------- reconstruct

struct ReconstructArgs {
  std::string input;
  cli::ProbeArgs probe;
  std::size_t support = 0;
  std::string mask;
  bool nonlinear = false;
  SolverConfig solver;
  std::string truth;
  std::string name = "recon";
};

void run_reconstruct(const ReconstructArgs& a, const CLI::App* cmd) {
  const io::FieldFile file = io::read_file(a.input);
  RealImage data = io::read_real_image(a.input);
  if (!file.sidecar.contains("geometry")) throw ValidationError("input sidecar lacks the imaging geometry");
  const ImagingGeometry geom = cli::geometry_from_json(file.sidecar.at("geometry"));
  const ProbeSpec probe = probe_given(cmd) || !file.sidecar.contains("probe")
                              ? a.probe.spec()
                              : cli::probe_from_json(file.sidecar.at("probe"));
  a.solver.validate();

  const Grid object_grid = geom.dimensionless(data.grid);
  if (!object_grid.approx_equal(object_grid.dual(), 1e-9)) {
    throw ValidationError("reconstruct needs critically sampled data, k pixel^2 / d = 2 pi / n (simulate --critical)");
  }
  SupportBox support;
  if (a.support > 0) {
    support = SupportBox::centered(object_grid, a.support);
  } else if (file.sidecar.contains("support")) {
    support = support_from(file.sidecar, object_grid);
  } else {
    support = SupportBox::centered(object_grid, object_grid.n(0) / 4);
  }
  if (!a.mask.empty()) data.mask = cli::parse_window(a.mask, data.grid);

  RealImage dimless_data(object_grid, data.values);
  dimless_data.mask = data.mask;
  const Reconstruction rec =
      a.nonlinear ? reconstruct_nonlinear(dimless_data, probe, FresnelChirp{}, Perturbation::zero(object_grid, support),
                                          a.solver)
                  : reconstruct_linear(dimless_data, probe, FresnelChirp{}, object_grid, support, a.solver);
  const TransmissionFunction o = recover_object(rec.h, probe);
  const ComplexField o_phys(data.grid, o.o.values);

  json report{{"method", a.nonlinear ? "gauss-newton" : "linearized-cg"},
              {"solver", a.solver},
              {"convergence", rec.report},
              {"support", support_json(support)},
              {"data_samples", std::count_if(data.values.begin(), data.values.end(), [&, i = std::size_t{0}](double) mutable {
                 return data.in_mask(i++);
               })}};
  if (!a.truth.empty()) {
    ComplexField truth = io::read_complex_field(a.truth);
    if (truth.grid.n(0) < data.grid.n(0)) truth = pad_field(truth, static_cast<int>(data.grid.n(0) / truth.grid.n(0)), 1.0);
    if (!truth.grid.same_shape(data.grid)) throw ValidationError("--truth does not match the data grid");
    std::vector<cplx> a1(truth.size()), b1(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
      a1[i] = o_phys[i] - 1.0;
      b1[i] = truth[i] - 1.0;
    }
    report["truth_error"] = relative_error(a1, b1);
  }
  const json meta{{"geometry", cli::geometry_json(geom)}, {"probe", cli::probe_json(probe)}};
  io::write_field(global.path(a.name + "_h.hfld"), rec.h.h, meta);
  io::write_field(global.path(a.name + "_o.hfld"), o_phys, meta);
  write_json(global.path(a.name + "_convergence.json"), report);
  std::string line = "reconstruct: " + std::to_string(rec.report.iterations) + " CG iterations, converged " +
                     (rec.report.converged ? "yes" : "no");
  if (report.contains("truth_error")) line += ", error vs truth " + fmt(report["truth_error"].get<double>());
  say(line);
}

// ---------------------------------------------------------------- tomo

struct TomoSimArgs {
  std::size_t n = 64;
  double peak_phase = 0.5;
  double peak_absorption = 0.05;
  std::size_t angles = 180;
  double k = 1.0;
  double pixel = 1.0;
  cli::ProbeArgs probe;
  std::string delta;
  std::string beta;
  double support_radius = 0.0;
  bool allow_wrap = false;
  std::string name = "tomo";
};

void run_tomo_sim(const TomoSimArgs& a) {
  Volume v;
  if (!a.delta.empty()) {
    RealImage delta = io::read_real_image(a.delta);
    RealImage beta = a.beta.empty() ? RealImage(delta.grid) : io::read_real_image(a.beta);
    const double r = a.support_radius > 0.0 ? a.support_radius
                                            : 0.25 * static_cast<double>(delta.grid.n(0)) * delta.grid.spacing(0);
    v = Volume{std::move(delta), std::move(beta), r};
  } else {
    v = smooth_phantom(a.n, a.pixel, a.k, a.peak_phase, a.peak_absorption);
  }
  v.validate();
  const std::size_t n = v.grid().n(0);
  const double pixel = v.grid().spacing(0);
  const ImagingGeometry geom{a.k, ImagingGeometry::critical_distance(a.k, pixel, 2 * n), pixel, 1};
  const ProbeSpec probe = a.probe.spec();
  if (a.angles < 1) throw ValidationError("--angles must be >= 1");
  const std::vector<double> angles = uniform_angles(a.angles);

  TomoForwardOptions opt;
  opt.check_phase_wrap = !a.allow_wrap;
  const std::vector<RealImage> images = tomo_forward(v, probe, geom, angles, opt);

  std::vector<double> stack;
  for (const auto& img : images) stack.insert(stack.end(), img.values.begin(), img.values.end());
  const json meta{{"kind", "tomo_intensities"},
                  {"geometry", cli::geometry_json(geom)},
                  {"probe", cli::probe_json(probe)},
                  {"angles", angles},
                  {"support_radius", v.support_radius}};
  io::write_real_array(global.path(a.name + "_images.hfld"), {static_cast<std::uint32_t>(angles.size()),
                                                               static_cast<std::uint32_t>(2 * n)},
                       stack, meta);
  io::write_field(global.path(a.name + "_delta.hfld"), v.delta, {{"support_radius", v.support_radius}});
  io::write_field(global.path(a.name + "_beta.hfld"), v.beta, {{"support_radius", v.support_radius}});
  // Grids need even axes, so odd angle counts get no preview image.
  if (angles.size() % 2 == 0) {
    io::write_pgm(global.path(a.name + "_images.pgm"), RealImage(Grid::plane(angles.size(), 2 * n, 1.0), stack));
  }
  say("tomo sim: " + std::to_string(angles.size()) + " angles, detector " + std::to_string(2 * n) + " -> " +
      global.path(a.name + "_images.hfld").string());
}

struct TomoReconArgs {
  std::string input;
  bool nonlinear = false;
  SolverConfig solver;
  double support_radius = 0.0;
  bool allow_wrap = false;
  bool hann = false;
  std::string truth_delta;
  std::string truth_beta;
  std::string name = "tomo_recon";
};

void run_tomo_recon(const TomoReconArgs& a) {
  const io::FieldFile file = io::read_file(a.input);
  if (file.dtype != io::DType::Real || file.dims.size() != 2) {
    throw ValidationError("tomo recon expects a real angles x detector stack");
  }
  const json& sc = file.sidecar;
  if (!sc.contains("geometry") || !sc.contains("angles")) throw ValidationError("stack sidecar lacks geometry or angles");
  const ImagingGeometry geom = cli::geometry_from_json(sc.at("geometry"));
  const ProbeSpec probe = cli::probe_from_json(sc.at("probe"));
  const auto angles = sc.at("angles").get<std::vector<double>>();
  const std::size_t na = file.dims[0];
  const std::size_t nd = file.dims[1];
  if (angles.size() != na) throw ValidationError("angle list does not match the stack");
  std::vector<RealImage> images;
  for (std::size_t i = 0; i < na; ++i) {
    images.emplace_back(Grid::line(nd, geom.pixel),
                        std::vector<double>(file.real.begin() + static_cast<long>(i * nd),
                                            file.real.begin() + static_cast<long>((i + 1) * nd)));
  }
  TomoReconOptions opt;
  opt.nonlinear = a.nonlinear;
  opt.support_radius = a.support_radius > 0.0 ? a.support_radius : sc.value("support_radius", 0.0);
  opt.check_branch = !a.allow_wrap;
  opt.fbp.hann = a.hann;
  const TomoReconstruction rec = tomo_reconstruct(images, probe, geom, angles, a.solver, opt);

  json report{{"angles", na}, {"method", a.nonlinear ? "gauss-newton" : "linearized-cg"}, {"solver", a.solver}};
  int cg = 0;
  bool converged = true;
  for (const auto& r : rec.reports) {
    cg += r.iterations;
    converged = converged && r.converged;
  }
  report["cg_iterations"] = cg;
  report["all_converged"] = converged;
  std::string line = "tomo recon: " + std::to_string(na) + " angles";
  if (!a.truth_delta.empty()) {
    const double e = relative_error(rec.volume.delta.values, io::read_real_image(a.truth_delta).values);
    report["delta_error"] = e;
    line += ", delta error " + fmt(e);
  }
  if (!a.truth_beta.empty()) {
    const double e = relative_error(rec.volume.beta.values, io::read_real_image(a.truth_beta).values);
    report["beta_error"] = e;
    line += ", beta error " + fmt(e);
  }
  const json meta{{"support_radius", rec.volume.support_radius}};
  io::write_field(global.path(a.name + "_delta.hfld"), rec.volume.delta, meta);
  io::write_field(global.path(a.name + "_beta.hfld"), rec.volume.beta, meta);
  io::write_pgm(global.path(a.name + "_delta.pgm"), rec.volume.delta);
  io::write_pgm(global.path(a.name + "_beta.pgm"), rec.volume.beta);
  write_json(global.path(a.name + "_report.json"), report);
  say(line);
}

// ---------------------------------------------------------------- probe-uniqueness

struct UniquenessArgs {
  std::size_t unknowns = 32;
  std::size_t samples = 128;
  cli::ProbeArgs probe;
  std::string masks = "100";
  double reg_alpha = 1e-8;
  int cg_max_iter = 20000;
  std::string name = "uniqueness";
};

void run_uniqueness(const UniquenessArgs& a) {
  RestrictedExperimentConfig cfg;
  cfg.probe = a.probe.spec();
  cfg.object_grid = critical_line(a.samples);
  cfg.support = SupportBox::centered(cfg.object_grid, a.unknowns);
  if (2 * a.unknowns > kDenseBudget) {
    throw BudgetError(std::to_string(2 * a.unknowns) + " real unknowns exceed the dense budget of " +
                      std::to_string(kDenseBudget));
  }
  cfg.fractions = cli::parse_fractions(a.masks);
  cfg.solver.reg_alpha = a.reg_alpha;
  cfg.solver.cg_max_iter = a.cg_max_iter;
  const auto results = restricted_data_experiment(cfg);

  const json out{{"probe", cli::probe_json(cfg.probe)},
                 {"complex_unknowns", a.unknowns},
                 {"data_samples", a.samples},
                 {"reg_alpha", a.reg_alpha},
                 {"results", restricted_json(results)}};
  write_json(global.path(a.name + ".json"), out);
  const fs::path csv = global.path(a.name + "_spectra.csv");
  std::ofstream(csv) << spectra_csv(results);
  for (const auto& r : results) {
    say("probe-uniqueness: " + fmt(r.fraction * 100.0) + "% data, rank " + std::to_string(r.report.rank) + "/" +
        std::to_string(r.report.n_unknowns) + ", sigma_min/sigma_max " +
        fmt(r.report.sigma_max > 0 ? r.report.sigma_min / r.report.sigma_max : 0.0) + ", reconstruction error " +
        fmt(r.reconstruction_error));
  }
}

// ---------------------------------------------------------------- flatfield

struct FlatfieldArgs {
  std::string input;
  cli::ProbeArgs probe;
  std::string name = "flat";
};

void run_flatfield(const FlatfieldArgs& a, const CLI::App* cmd) {
  const io::FieldFile file = io::read_file(a.input);
  const RealImage img = io::read_real_image(a.input);
  if (!file.sidecar.contains("geometry")) throw ValidationError("input sidecar lacks the imaging geometry");
  const ImagingGeometry geom = cli::geometry_from_json(file.sidecar.at("geometry"));
  const ProbeSpec probe = probe_given(cmd) || !file.sidecar.contains("probe")
                              ? a.probe.spec()
                              : cli::probe_from_json(file.sidecar.at("probe"));
  RealImage norm = flat_field_normalize(img, probe, geom);
  norm.mask = img.mask;
  json meta = file.sidecar;
  meta["kind"] = "flat_field_normalized";
  meta.erase("pgm_scaling");
  meta["pgm_scaling"] = io::scaling_json(io::write_pgm(global.path(a.name + ".pgm"), norm));
  io::write_field(global.path(a.name + ".hfld"), norm, meta);
  say("flatfield: -> " + global.path(a.name + ".hfld").string());
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const PhaseWrapError*>(&e)) return 5;
  if (dynamic_cast<const SolverError*>(&e)) return 4;
  if (dynamic_cast<const AliasingError*>(&e)) return 3;
  if (dynamic_cast<const Error*>(&e) && !dynamic_cast<const ValidationError*>(&e) &&
      !dynamic_cast<const BudgetError*>(&e) && !dynamic_cast<const ProbeZero*>(&e) &&
      !dynamic_cast<const ZeroTransmission*>(&e) && !dynamic_cast<const DivisionByNearZero*>(&e) &&
      !dynamic_cast<const SupportError*>(&e)) {
    return 1;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Propagation-based phase contrast imaging: simulation, reconstruction and uniqueness probes"};
  app.config_formatter(std::make_shared<cli::JsonConfig>());
  app.set_config("--config", "", "JSON file with option values; explicit flags win");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.add_option("--out", global.out, "output directory");
  app.add_option("--seed", global.seed, "random seed");
  app.add_flag("--quiet", global.quiet, "suppress progress output");
  app.require_subcommand(1);
  app.fallthrough();

  PhantomArgs phantom;
  auto* c_phantom = app.add_subcommand("phantom", "write a disc phantom (projection and transmission)");
  c_phantom->add_flag("--disc", phantom.disc, "disc-shaped object (the only shape)");
  c_phantom->add_option("--n", phantom.n, "samples per axis");
  c_phantom->add_option("--dim", phantom.dim, "lateral dimension, 1 or 2");
  c_phantom->add_option("--radius-frac", phantom.radius_frac, "disc radius as a fraction of n");
  c_phantom->add_option("--phi", phantom.phi, "phase shift inside the disc");
  c_phantom->add_option("--mu", phantom.mu, "absorption inside the disc (>= 0)");
  c_phantom->add_option("--edge-width", phantom.edge, "cosine edge ramp in pixels");
  c_phantom->add_option("--pixel", phantom.pixel, "physical pixel size");
  c_phantom->add_option("--name", phantom.name, "output file stem");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "holographic intensity of a transmission file");
  c_sim->add_option("--object", sim.object, "transmission HFLD file")->required();
  c_sim->add_option("--k", sim.k, "wavenumber");
  c_sim->add_option("--d", sim.d, "propagation distance");
  c_sim->add_option("--fresnel-caption", sim.fresnel, "dimensionless 2 pi d / (k R^2); sets d");
  c_sim->add_option("--radius", sim.radius, "object radius R for --fresnel-caption (default: sidecar)");
  c_sim->add_flag("--critical", sim.critical,
                  "choose d so the padded detector is critically sampled and keep the whole padded detector");
  add_probe_options(c_sim, sim.probe);
  c_sim->add_option("--pad", sim.pad, "padding factor");
  c_sim->add_flag("--far-field", sim.far_field, "also write the log-scaled far-field pattern");
  c_sim->add_option("--noise-sigma", sim.noise, "additive Gaussian noise level");
  c_sim->add_flag("--linearized", sim.linearized, "write I - |D(P(O - 1))|^2 instead of I");
  c_sim->add_option("--name", sim.name, "output file stem");

  ReconstructArgs recon;
  auto* c_recon = app.add_subcommand("reconstruct", "recover h and o from one intensity image");
  c_recon->add_option("--input", recon.input, "intensity HFLD file")->required();
  add_probe_options(c_recon, recon.probe);
  c_recon->add_option("--support", recon.support, "support box size in samples (default: sidecar or n/4)");
  c_recon->add_option("--mask", recon.mask, "data window x0:x1[,y0:y1] in sample indices");
  c_recon->add_flag("--nonlinear", recon.nonlinear, "Gauss-Newton on the full model");
  add_solver_options(c_recon, recon.solver);
  c_recon->add_option("--truth", recon.truth, "true transmission HFLD, reports the relative error of o - 1");
  c_recon->add_option("--name", recon.name, "output file stem");

  auto* c_tomo = app.add_subcommand("tomo", "single-distance tomography");
  c_tomo->require_subcommand(1);
  c_tomo->fallthrough();
  TomoSimArgs tsim;
  auto* c_tsim = c_tomo->add_subcommand("sim", "per-angle intensities of a volume slice");
  c_tsim->add_option("--n", tsim.n, "volume samples per axis for the built-in phantom");
  c_tsim->add_option("--peak-phase", tsim.peak_phase, "peak k R(delta) of the built-in phantom");
  c_tsim->add_option("--peak-absorption", tsim.peak_absorption, "peak k R(beta) of the built-in phantom");
  c_tsim->add_option("--angles", tsim.angles, "number of angles over [0, pi)");
  c_tsim->add_option("--k", tsim.k, "wavenumber");
  c_tsim->add_option("--pixel", tsim.pixel, "pixel size of the built-in phantom");
  add_probe_options(c_tsim, tsim.probe);
  c_tsim->add_option("--delta", tsim.delta, "delta slice HFLD instead of the built-in phantom");
  c_tsim->add_option("--beta", tsim.beta, "beta slice HFLD");
  c_tsim->add_option("--support-radius", tsim.support_radius, "support disc radius for --delta volumes");
  c_tsim->add_flag("--allow-wrap", tsim.allow_wrap, "skip the phase-wrap validator");
  c_tsim->add_option("--name", tsim.name, "output file stem");

  TomoReconArgs trec;
  auto* c_trec = c_tomo->add_subcommand("recon", "recover delta and beta from per-angle intensities");
  c_trec->add_option("--input", trec.input, "stack written by tomo sim")->required();
  c_trec->add_flag("--nonlinear", trec.nonlinear, "Gauss-Newton retrieval per angle");
  add_solver_options(c_trec, trec.solver);
  c_trec->add_option("--support-radius", trec.support_radius, "support disc radius (default: sidecar or n/4)");
  c_trec->add_flag("--allow-wrap", trec.allow_wrap, "skip the branch-boundary check");
  c_trec->add_flag("--hann", trec.hann, "Hann-windowed ramp filter");
  c_trec->add_option("--truth-delta", trec.truth_delta, "true delta slice, reports the relative error");
  c_trec->add_option("--truth-beta", trec.truth_beta, "true beta slice, reports the relative error");
  c_trec->add_option("--name", trec.name, "output file stem");

  UniquenessArgs uq;
  auto* c_uq = app.add_subcommand("probe-uniqueness", "singular spectra of the linearized operator under data masks");
  c_uq->add_option("--unknowns", uq.unknowns, "complex unknowns (support samples)");
  c_uq->add_option("--samples", uq.samples, "critically sampled data points");
  add_probe_options(c_uq, uq.probe);
  c_uq->add_option("--masks", uq.masks, "centered data fractions in percent, e.g. 100,50,25,10");
  c_uq->add_option("--reg-alpha", uq.reg_alpha, "Tikhonov weight of the restricted reconstructions");
  c_uq->add_option("--cg-max-iter", uq.cg_max_iter, "CG iteration limit");
  c_uq->add_option("--name", uq.name, "output file stem");

  FlatfieldArgs ff;
  auto* c_ff = app.add_subcommand("flatfield", "divide an intensity by the empty-beam intensity");
  c_ff->add_option("--input", ff.input, "intensity HFLD file")->required();
  add_probe_options(c_ff, ff.probe);
  c_ff->add_option("--name", ff.name, "output file stem");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    fs::create_directories(global.out);
    if (*c_phantom) run_phantom(phantom);
    if (*c_sim) run_simulate(sim);
    if (*c_recon) run_reconstruct(recon, c_recon);
    if (*c_tsim) run_tomo_sim(tsim);
    if (*c_trec) run_tomo_recon(trec);
    if (*c_uq) run_uniqueness(uq);
    if (*c_ff) run_flatfield(ff, c_ff);
  } catch (const PhaseWrapError& e) {
    std::cerr << "phase wrap: " << e.what() << " (theta = " << e.theta() << ", x = " << e.x() << ")\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return 0;
}
