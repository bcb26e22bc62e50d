#include "config.hpp"

#include "pci/errors.hpp"

#include <sstream>

namespace pci::cli {

namespace {

void flatten(const json& node, std::vector<std::string>& parents, std::vector<CLI::ConfigItem>& out) {
  for (const auto& [key, value] : node.items()) {
    if (value.is_object()) {
      parents.push_back(key);
      flatten(value, parents, out);
      parents.pop_back();
      continue;
    }
    CLI::ConfigItem item;
    item.parents = parents;
    item.name = key;
    auto text = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
    if (value.is_array()) {
      for (const auto& v : value) item.inputs.push_back(text(v));
    } else {
      item.inputs.push_back(text(value));
    }
    out.push_back(std::move(item));
  }
}

double parse_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ValidationError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw ValidationError("not a number: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, sep)) parts.push_back(part);
  return parts;
}

std::pair<std::size_t, std::size_t> parse_range(const std::string& s, std::size_t n) {
  const auto ends = split(s, ':');
  if (ends.size() != 2) throw ValidationError("mask range must look like begin:end, got '" + s + "'");
  const double a = parse_number(ends[0]);
  const double b = parse_number(ends[1]);
  if (a < 0 || b > static_cast<double>(n) || !(a < b) || a != std::floor(a) || b != std::floor(b)) {
    throw ValidationError("mask range '" + s + "' must satisfy 0 <= begin < end <= " + std::to_string(n));
  }
  return {static_cast<std::size_t>(a), static_cast<std::size_t>(b)};
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

}  // namespace

std::string JsonConfig::to_config(const CLI::App* app, bool default_also, bool, std::string) const {
  json out = json::object();
  for (const CLI::Option* opt : app->get_options()) {
    if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
    const std::string name = opt->get_lnames().front();
    if (opt->count() > 0) {
      const auto& res = opt->results();
      out[name] = res.size() == 1 ? json(res.front()) : json(res);
    } else if (default_also && !opt->get_default_str().empty()) {
      out[name] = opt->get_default_str();
    }
  }
  return out.dump(2);
}

std::vector<CLI::ConfigItem> JsonConfig::from_config(std::istream& input) const {
  json root;
  try {
    root = json::parse(input);
  } catch (const json::parse_error& e) {
    throw CLI::ConversionError("config file is not valid JSON: " + std::string(e.what()));
  }
  if (!root.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
  std::vector<CLI::ConfigItem> items;
  std::vector<std::string> parents;
  flatten(root, parents, items);
  return items;
}

cplx parse_complex(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() == 1) return {parse_number(parts[0]), 0.0};
  if (parts.size() == 2) return {parse_number(parts[0]), parse_number(parts[1])};
  throw ValidationError("complex value must look like re,im, got '" + text + "'");
}

std::vector<std::uint8_t> parse_window(const std::string& text, const Grid& grid) {
  const auto axes = split(text, ',');
  if (static_cast<int>(axes.size()) != grid.ndim()) {
    throw ValidationError("mask '" + text + "' needs one range per axis (" + std::to_string(grid.ndim()) + ")");
  }
  MaskWindow w;
  if (grid.ndim() == 1) {
    std::tie(w.begin[0], w.end[0]) = parse_range(axes[0], grid.n(0));
  } else {
    std::tie(w.begin[1], w.end[1]) = parse_range(axes[0], grid.n(1));
    std::tie(w.begin[0], w.end[0]) = parse_range(axes[1], grid.n(0));
  }
  return make_mask(grid, w);
}

std::vector<double> parse_fractions(const std::string& text) {
  std::vector<double> out;
  for (const auto& p : split(text, ',')) {
    const double v = parse_number(p);
    if (!(v > 0.0 && v <= 100.0)) throw ValidationError("mask percentages must lie in (0, 100], got " + p);
    out.push_back(v / 100.0);
  }
  if (out.empty()) throw ValidationError("no mask percentages given");
  return out;
}

ProbeSpec ProbeArgs::spec() const {
  ProbeSpec probe;
  if (type == "plane") {
    probe = PlaneWave{parse_complex(p0)};
  } else if (type == "gaussian") {
    probe = GaussianBeam{parse_complex(p0), parse_complex(alpha0)};
  } else {
    throw ValidationError("unknown probe '" + type + "', expected plane or gaussian");
  }
  validate(probe);
  return probe;
}

json probe_json(const ProbeSpec& probe) {
  if (const auto* p = std::get_if<PlaneWave>(&probe)) return {{"type", "plane"}, {"p0", complex_json(p->p0)}};
  if (const auto* g = std::get_if<GaussianBeam>(&probe)) {
    return {{"type", "gaussian"}, {"p0", complex_json(g->p0)}, {"alpha0", complex_json(g->alpha0)}};
  }
  throw ValidationError("custom probes cannot be stored in a sidecar");
}

ProbeSpec probe_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  ProbeSpec probe;
  if (type == "plane") {
    probe = PlaneWave{complex_from(j.at("p0"))};
  } else if (type == "gaussian") {
    probe = GaussianBeam{complex_from(j.at("p0")), complex_from(j.at("alpha0"))};
  } else {
    throw ValidationError("unknown probe type in sidecar: " + type);
  }
  validate(probe);
  return probe;
}

json geometry_json(const ImagingGeometry& geom) {
  return {{"k", geom.k}, {"d", geom.d}, {"pixel", geom.pixel}, {"m", geom.m}};
}

ImagingGeometry geometry_from_json(const json& j) {
  ImagingGeometry g{j.at("k").get<double>(), j.at("d").get<double>(), j.at("pixel").get<double>(),
                    j.at("m").get<int>()};
  g.validate();
  return g;
}

}  // namespace pci::cli
