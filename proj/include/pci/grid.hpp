#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace pci {

using cplx = std::complex<double>;

/// Uniform grid centered at the origin with one or two axes.
///
/// Axis 0 is the slow (row) axis, the last axis is the fast one. Sample j of
/// an axis sits at x_j = (j - n/2) * spacing, so index n/2 is the origin and
/// every axis has an even sample count.
class Grid {
public:
  Grid() = default;

  static Grid line(std::size_t n, double spacing);
  static Grid plane(std::size_t rows, std::size_t cols, double spacing);
  static Grid plane(std::size_t rows, std::size_t cols, double row_spacing, double col_spacing);

  int ndim() const noexcept { return ndim_; }
  std::size_t n(int axis) const { return n_[static_cast<std::size_t>(axis)]; }
  double spacing(int axis) const { return dx_[static_cast<std::size_t>(axis)]; }
  std::size_t size() const noexcept;

  /// Coordinate of sample j along an axis.
  double position(int axis, std::size_t j) const;
  /// Sample index of the origin along an axis.
  std::size_t center(int axis) const { return n(axis) / 2; }

  /// Product of the spacings, the quadrature weight of one sample.
  double cell_measure() const noexcept;

  /// Reciprocal grid: same sample counts, spacing 2*pi/(n*dx) per axis.
  Grid dual() const;

  /// Same sample counts with every spacing multiplied by `factor`.
  Grid scaled(double factor) const;

  bool operator==(const Grid& other) const;
  bool same_shape(const Grid& other) const;
  /// Equal shape and spacings equal to a relative tolerance.
  bool approx_equal(const Grid& other, double rel_tol = 1e-12) const;

private:
  int ndim_ = 0;
  std::array<std::size_t, 2> n_{0, 0};
  std::array<double, 2> dx_{0.0, 0.0};
};

/// Half-open index box [begin, end) per axis.
struct SupportBox {
  std::array<std::size_t, 2> begin{0, 0};
  std::array<std::size_t, 2> end{0, 0};

  static SupportBox whole(const Grid& grid);
  /// Box of `count` samples per axis centered on the grid origin.
  static SupportBox centered(const Grid& grid, std::size_t count);

  bool contains(const Grid& grid, std::size_t flat_index) const;
  std::size_t count(const Grid& grid) const;
  void validate(const Grid& grid) const;
};

/// Complex samples on a grid, row-major.
struct ComplexField {
  Grid grid;
  std::vector<cplx> values;

  ComplexField() = default;
  explicit ComplexField(Grid g, cplx fill = {0.0, 0.0});
  ComplexField(Grid g, std::vector<cplx> v);

  cplx& operator[](std::size_t i) { return values[i]; }
  const cplx& operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const noexcept { return values.size(); }

  /// Throws ValidationError on size mismatch or non-finite samples.
  void validate() const;
};

/// Real samples on a grid with an optional data mask (1 = inside U).
struct RealImage {
  Grid grid;
  std::vector<double> values;
  std::optional<std::vector<std::uint8_t>> mask;

  RealImage() = default;
  explicit RealImage(Grid g, double fill = 0.0);
  RealImage(Grid g, std::vector<double> v);

  double& operator[](std::size_t i) { return values[i]; }
  const double& operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const noexcept { return values.size(); }

  bool in_mask(std::size_t i) const { return !mask || (*mask)[i] != 0; }
  void validate() const;
};

/// Contiguous data window, [begin, end) sample indices per axis.
struct MaskWindow {
  std::array<std::size_t, 2> begin{0, 0};
  std::array<std::size_t, 2> end{0, 0};
};

std::vector<std::uint8_t> make_mask(const Grid& grid, const MaskWindow& window);
/// Centered contiguous window covering `fraction` of the samples per axis.
std::vector<std::uint8_t> centered_mask(const Grid& grid, double fraction);

double l2_norm(std::span<const cplx> v);
double l2_norm(std::span<const double> v);
/// ||a - b|| / ||b||.
double relative_error(std::span<const cplx> a, std::span<const cplx> b);
double relative_error(std::span<const double> a, std::span<const double> b);
double max_abs_diff(std::span<const cplx> a, std::span<const cplx> b);
double max_abs_diff(std::span<const double> a, std::span<const double> b);

}  // namespace pci
