#pragma once

#include "pci/grid.hpp"
#include "pci/optics.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <string>
#include <vector>

namespace pci::cli {

using json = nlohmann::json;

/// Reads `--config file.json` for CLI11. Top-level keys are global option
/// names, nested objects address subcommands ({"tomo": {"sim": {...}}}).
/// Arrays become multi-valued inputs.
class JsonConfig : public CLI::Config {
public:
  std::string to_config(const CLI::App* app, bool default_also, bool write_description,
                        std::string prefix) const override;
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;
};

/// "re,im" or "re".
cplx parse_complex(const std::string& text);

/// "x0:x1" for 1-D grids, "x0:x1,y0:y1" for 2-D; x runs along columns.
/// Half-open sample index ranges.
std::vector<std::uint8_t> parse_window(const std::string& text, const Grid& grid);

/// Percentages "100,50,25,10" -> {1, 0.5, 0.25, 0.1}.
std::vector<double> parse_fractions(const std::string& text);

struct ProbeArgs {
  std::string type = "plane";
  std::string p0 = "1,0";
  std::string alpha0 = "-0.02,-0.02";

  ProbeSpec spec() const;
};

json probe_json(const ProbeSpec& probe);
/// Inverse of probe_json for plane and Gaussian probes.
ProbeSpec probe_from_json(const json& j);

json geometry_json(const ImagingGeometry& geom);
ImagingGeometry geometry_from_json(const json& j);

}  // namespace pci::cli
