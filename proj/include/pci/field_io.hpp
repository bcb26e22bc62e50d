#pragma once

#include "pci/grid.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <variant>

namespace pci::io {

using json = nlohmann::json;

/// HFLD v1 dtype codes.
enum class DType : std::uint32_t { Real = 1, Complex = 2 };

/// Payload and sidecar of one HFLD file.
struct FieldFile {
  DType dtype = DType::Real;
  std::vector<std::uint32_t> dims;
  std::vector<double> real;  // dtype Real
  std::vector<cplx> complex;  // dtype Complex
  json sidecar;                // contents of <name>.json, {} when absent
};

/// Sidecar path for a field file: same directory and stem, extension .json.
std::filesystem::path sidecar_path(const std::filesystem::path& field_path);

/// Writes the binary HFLD v1 file and its JSON sidecar. The sidecar always
/// carries "format", "version", "dims", "spacing", "dtype"; `extra` keys are
/// merged in.
void write_field(const std::filesystem::path& path, const ComplexField& field, const json& extra = {});
void write_field(const std::filesystem::path& path, const RealImage& image, const json& extra = {});
/// Raw array with explicit dims (used for sinograms / angle stacks).
void write_real_array(const std::filesystem::path& path, const std::vector<std::uint32_t>& dims,
                      const std::vector<double>& values, const json& extra = {});

FieldFile read_file(const std::filesystem::path& path);

/// Grid reconstructed from sidecar "spacing" and header dims.
Grid grid_from(const FieldFile& file);
ComplexField read_complex_field(const std::filesystem::path& path);
/// Real image with mask restored from "mask_rle" when present.
RealImage read_real_image(const std::filesystem::path& path);

/// Run lengths alternating false/true, starting with a (possibly empty) run
/// of false samples.
std::vector<std::uint64_t> encode_mask_rle(const std::vector<std::uint8_t>& mask);
std::vector<std::uint8_t> decode_mask_rle(const std::vector<std::uint64_t>& runs, std::size_t length);

struct PgmScaling {
  double min = 0.0;
  double max = 0.0;
  bool log10 = false;
};

/// 16-bit binary PGM (P5, maxval 65535, big-endian samples) with linear
/// min-max scaling, optionally of log10(value). Returns the scaling used.
PgmScaling write_pgm(const std::filesystem::path& path, const RealImage& image, bool log10 = false);

json scaling_json(const PgmScaling& s);

}  // namespace pci::io
