#include "pci/field_io.hpp"

#include "pci/errors.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace pci::io {

namespace {

constexpr std::array<char, 4> kMagic{'H', 'F', 'L', 'D'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "HFLD writer assumes a little-endian host");

void put_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t get_u32(std::ifstream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw ValidationError("HFLD: truncated header");
  return v;
}

void write_payload(const std::filesystem::path& path, DType dtype, const std::vector<std::uint32_t>& dims,
                   const double* data, std::size_t count) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(dims.size()));
  for (auto d : dims) put_u32(out, d);
  put_u32(out, static_cast<std::uint32_t>(dtype));
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
  if (!out) throw Error("write failed for " + path.string());
}

void write_sidecar(const std::filesystem::path& path, json meta) {
  std::ofstream out(sidecar_path(path));
  if (!out) throw Error("cannot write sidecar for " + path.string());
  out << meta.dump(2) << '\n';
}

std::vector<std::uint32_t> dims_of(const Grid& g) {
  if (g.ndim() == 1) return {static_cast<std::uint32_t>(g.n(0))};
  return {static_cast<std::uint32_t>(g.n(0)), static_cast<std::uint32_t>(g.n(1))};
}

json base_meta(const Grid& g, DType dtype) {
  json spacing = json::array();
  for (int a = 0; a < g.ndim(); ++a) spacing.push_back(g.spacing(a));
  return json{{"format", "HFLD"},
              {"version", kVersion},
              {"dims", dims_of(g)},
              {"spacing", spacing},
              {"dtype", dtype == DType::Real ? "real" : "complex"}};
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& field_path) {
  auto p = field_path;
  p.replace_extension(".json");
  return p;
}

void write_field(const std::filesystem::path& path, const ComplexField& field, const json& extra) {
  field.validate();
  const auto dims = dims_of(field.grid);
  write_payload(path, DType::Complex, dims, reinterpret_cast<const double*>(field.values.data()),
                2 * field.values.size());
  json meta = base_meta(field.grid, DType::Complex);
  if (extra.is_object()) meta.update(extra);
  write_sidecar(path, std::move(meta));
}

void write_field(const std::filesystem::path& path, const RealImage& image, const json& extra) {
  image.validate();
  write_payload(path, DType::Real, dims_of(image.grid), image.values.data(), image.values.size());
  json meta = base_meta(image.grid, DType::Real);
  if (image.mask) meta["mask_rle"] = encode_mask_rle(*image.mask);
  if (extra.is_object()) meta.update(extra);
  write_sidecar(path, std::move(meta));
}

void write_real_array(const std::filesystem::path& path, const std::vector<std::uint32_t>& dims,
                      const std::vector<double>& values, const json& extra) {
  std::size_t total = 1;
  for (auto d : dims) total *= d;
  if (total != values.size()) throw ValidationError("HFLD: dims do not match payload length");
  write_payload(path, DType::Real, dims, values.data(), values.size());
  json meta{{"format", "HFLD"}, {"version", kVersion}, {"dims", dims}, {"dtype", "real"}};
  if (extra.is_object()) meta.update(extra);
  write_sidecar(path, std::move(meta));
}

FieldFile read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw ValidationError(path.string() + " is not an HFLD file");
  if (get_u32(in) != kVersion) throw ValidationError("HFLD: unsupported version");
  const std::uint32_t ndim = get_u32(in);
  if (ndim == 0 || ndim > 8) throw ValidationError("HFLD: bad ndim");

  FieldFile file;
  std::size_t total = 1;
  for (std::uint32_t i = 0; i < ndim; ++i) {
    file.dims.push_back(get_u32(in));
    total *= file.dims.back();
  }
  const std::uint32_t code = get_u32(in);
  if (code == 1) {
    file.dtype = DType::Real;
    file.real.resize(total);
    in.read(reinterpret_cast<char*>(file.real.data()), static_cast<std::streamsize>(total * sizeof(double)));
  } else if (code == 2) {
    file.dtype = DType::Complex;
    file.complex.resize(total);
    in.read(reinterpret_cast<char*>(file.complex.data()),
            static_cast<std::streamsize>(2 * total * sizeof(double)));
  } else {
    throw ValidationError("HFLD: unknown dtype " + std::to_string(code));
  }
  if (!in) throw ValidationError("HFLD: truncated payload");

  if (std::ifstream side(sidecar_path(path)); side) {
    file.sidecar = json::parse(side);
  } else {
    file.sidecar = json::object();
  }
  return file;
}

Grid grid_from(const FieldFile& file) {
  std::vector<double> spacing(file.dims.size(), 1.0);
  if (file.sidecar.contains("spacing")) spacing = file.sidecar.at("spacing").get<std::vector<double>>();
  if (spacing.size() != file.dims.size()) throw ValidationError("HFLD sidecar spacing does not match dims");
  if (file.dims.size() == 1) return Grid::line(file.dims[0], spacing[0]);
  if (file.dims.size() == 2) return Grid::plane(file.dims[0], file.dims[1], spacing[0], spacing[1]);
  throw ValidationError("HFLD: only 1-D and 2-D grids map onto fields");
}

ComplexField read_complex_field(const std::filesystem::path& path) {
  FieldFile file = read_file(path);
  const Grid g = grid_from(file);
  if (file.dtype == DType::Complex) return ComplexField(g, std::move(file.complex));
  std::vector<cplx> v(file.real.begin(), file.real.end());
  return ComplexField(g, std::move(v));
}

RealImage read_real_image(const std::filesystem::path& path) {
  FieldFile file = read_file(path);
  if (file.dtype != DType::Real) throw ValidationError(path.string() + " holds complex data, expected real");
  const Grid g = grid_from(file);
  RealImage img(g, std::move(file.real));
  if (file.sidecar.contains("mask_rle")) {
    img.mask = decode_mask_rle(file.sidecar.at("mask_rle").get<std::vector<std::uint64_t>>(), img.size());
  }
  return img;
}

std::vector<std::uint64_t> encode_mask_rle(const std::vector<std::uint8_t>& mask) {
  std::vector<std::uint64_t> runs;
  bool current = false;
  std::uint64_t length = 0;
  for (auto m : mask) {
    const bool v = m != 0;
    if (v == current) {
      ++length;
    } else {
      runs.push_back(length);
      current = v;
      length = 1;
    }
  }
  runs.push_back(length);
  return runs;
}

std::vector<std::uint8_t> decode_mask_rle(const std::vector<std::uint64_t>& runs, std::size_t length) {
  std::vector<std::uint8_t> mask;
  mask.reserve(length);
  std::uint8_t value = 0;
  for (auto r : runs) {
    mask.insert(mask.end(), r, value);
    value = value ? 0 : 1;
  }
  if (mask.size() != length) throw ValidationError("mask_rle does not cover the field");
  return mask;
}

PgmScaling write_pgm(const std::filesystem::path& path, const RealImage& image, bool log10) {
  image.validate();
  std::vector<double> v = image.values;
  if (log10) {
    double floor = 0.0;
    for (double x : v) {
      if (x > 0.0 && (floor == 0.0 || x < floor)) floor = x;
    }
    if (floor == 0.0) floor = 1.0;
    for (double& x : v) x = std::log10(std::max(x, floor));
  }
  PgmScaling s{*std::min_element(v.begin(), v.end()), *std::max_element(v.begin(), v.end()), log10};
  const std::size_t rows = image.grid.ndim() == 2 ? image.grid.n(0) : 1;
  const std::size_t cols = image.grid.ndim() == 2 ? image.grid.n(1) : image.grid.n(0);

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << "P5\n" << cols << ' ' << rows << "\n65535\n";
  const double range = s.max - s.min;
  for (double x : v) {
    const double t = range > 0.0 ? (x - s.min) / range : 0.0;
    const auto q = static_cast<std::uint16_t>(std::lround(std::clamp(t, 0.0, 1.0) * 65535.0));
    const char bytes[2] = {static_cast<char>(q >> 8), static_cast<char>(q & 0xff)};
    out.write(bytes, 2);
  }
  return s;
}

json scaling_json(const PgmScaling& s) {
  return json{{"min", s.min}, {"max", s.max}, {"log10", s.log10}, {"maxval", 65535}};
}

}  // namespace pci::io
