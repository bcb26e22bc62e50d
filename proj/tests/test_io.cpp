#include "doctest.h"

#include "pci/errors.hpp"
#include "pci/field_io.hpp"
#include "support.hpp"

#include <filesystem>
#include <fstream>

using namespace pci;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path p = fs::temp_directory_path() / "pci_test_io";
  fs::create_directories(p);
  return p;
}

std::vector<unsigned char> bytes_of(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("complex HFLD round trip is bit exact") {
  test::Rng rng(1);
  const ComplexField f = test::random_field(Grid::plane(6, 8, 0.5, 0.25), rng);
  const fs::path path = temp_dir() / "field.hfld";
  io::write_field(path, f, {{"geometry", {{"k", 2.0}}}});
  const ComplexField g = io::read_complex_field(path);
  CHECK(g.values == f.values);
  CHECK(g.grid == f.grid);

  const auto raw = bytes_of(path);
  REQUIRE(raw.size() == 4 + 4 + 4 + 8 + 4 + 48 * 16);
  CHECK(std::string(raw.begin(), raw.begin() + 4) == "HFLD");
  CHECK(raw[4] == 1);   // version, little-endian
  CHECK(raw[8] == 2);   // ndim
  CHECK(raw[12] == 6);  // rows
  CHECK(raw[16] == 8);  // cols
  CHECK(raw[20] == 2);  // dtype complex

  const auto file = io::read_file(path);
  CHECK(file.sidecar.at("geometry").at("k") == 2.0);
  CHECK(file.sidecar.at("dtype") == "complex");
}

TEST_CASE("real image with mask round trip") {
  RealImage img(Grid::line(10, 0.1));
  for (std::size_t i = 0; i < 10; ++i) img[i] = 0.5 * static_cast<double>(i);
  img.mask = std::vector<std::uint8_t>{1, 1, 0, 0, 0, 1, 1, 1, 0, 1};
  const fs::path path = temp_dir() / "image.hfld";
  io::write_field(path, img);
  const RealImage back = io::read_real_image(path);
  CHECK(back.values == img.values);
  REQUIRE(back.mask.has_value());
  CHECK(*back.mask == *img.mask);
}

TEST_CASE("mask run-length encoding starts with false") {
  const std::vector<std::uint8_t> m{1, 1, 0, 1};
  const auto runs = io::encode_mask_rle(m);
  CHECK(runs == std::vector<std::uint64_t>{0, 2, 1, 1});
  CHECK(io::decode_mask_rle(runs, 4) == m);
  CHECK_THROWS_AS(io::decode_mask_rle(runs, 5), ValidationError);
}

TEST_CASE("corrupt files are rejected") {
  const fs::path path = temp_dir() / "bad.hfld";
  std::ofstream(path, std::ios::binary) << "HFLX";
  CHECK_THROWS_AS(io::read_file(path), ValidationError);
}

TEST_CASE("16-bit pgm is big-endian with recorded scaling") {
  RealImage img(Grid::plane(2, 2, 1.0), std::vector<double>{1.0, 2.0, 3.0, 5.0});
  const fs::path path = temp_dir() / "img.pgm";
  const auto s = io::write_pgm(path, img);
  CHECK(s.min == 1.0);
  CHECK(s.max == 5.0);
  const auto raw = bytes_of(path);
  const std::string header = "P5\n2 2\n65535\n";
  REQUIRE(raw.size() == header.size() + 8);
  CHECK(std::string(raw.begin(), raw.begin() + static_cast<long>(header.size())) == header);
  CHECK(raw[header.size()] == 0);
  CHECK(raw[header.size() + 6] == 0xff);
  CHECK(raw[header.size() + 7] == 0xff);
  const auto log_scale = io::write_pgm(path, img, true);
  CHECK(log_scale.max == doctest::Approx(std::log10(5.0)));
}
