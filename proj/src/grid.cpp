#include "pci/grid.hpp"

#include "pci/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace pci {

namespace {

void check_axis(std::size_t n, double dx) {
  if (n < 2 || n % 2 != 0) {
    throw ValidationError("grid axes need an even sample count >= 2, got " + std::to_string(n));
  }
  if (!(dx > 0.0) || !std::isfinite(dx)) {
    throw ValidationError("grid spacing must be positive and finite");
  }
}

}  // namespace

Grid Grid::line(std::size_t n, double spacing) {
  check_axis(n, spacing);
  Grid g;
  g.ndim_ = 1;
  g.n_ = {n, 1};
  g.dx_ = {spacing, 1.0};
  return g;
}

Grid Grid::plane(std::size_t rows, std::size_t cols, double spacing) {
  return plane(rows, cols, spacing, spacing);
}

Grid Grid::plane(std::size_t rows, std::size_t cols, double row_spacing, double col_spacing) {
  check_axis(rows, row_spacing);
  check_axis(cols, col_spacing);
  Grid g;
  g.ndim_ = 2;
  g.n_ = {rows, cols};
  g.dx_ = {row_spacing, col_spacing};
  return g;
}

std::size_t Grid::size() const noexcept {
  if (ndim_ == 0) return 0;
  return ndim_ == 1 ? n_[0] : n_[0] * n_[1];
}

double Grid::position(int axis, std::size_t j) const {
  return (static_cast<double>(j) - static_cast<double>(n(axis) / 2)) * spacing(axis);
}

double Grid::cell_measure() const noexcept {
  return ndim_ == 1 ? dx_[0] : dx_[0] * dx_[1];
}

Grid Grid::dual() const {
  Grid g = *this;
  for (int a = 0; a < ndim_; ++a) {
    const auto ia = static_cast<std::size_t>(a);
    g.dx_[ia] = 2.0 * std::numbers::pi / (static_cast<double>(n_[ia]) * dx_[ia]);
  }
  return g;
}

Grid Grid::scaled(double factor) const {
  if (!(factor > 0.0)) throw ValidationError("grid scale factor must be positive");
  Grid g = *this;
  for (int a = 0; a < ndim_; ++a) g.dx_[static_cast<std::size_t>(a)] *= factor;
  return g;
}

bool Grid::operator==(const Grid& other) const {
  return ndim_ == other.ndim_ && n_ == other.n_ && dx_ == other.dx_;
}

bool Grid::same_shape(const Grid& other) const {
  return ndim_ == other.ndim_ && n_ == other.n_;
}

bool Grid::approx_equal(const Grid& other, double rel_tol) const {
  if (!same_shape(other)) return false;
  for (int a = 0; a < ndim_; ++a) {
    const auto ia = static_cast<std::size_t>(a);
    if (std::abs(dx_[ia] - other.dx_[ia]) > rel_tol * std::max(dx_[ia], other.dx_[ia])) {
      return false;
    }
  }
  return true;
}

SupportBox SupportBox::whole(const Grid& grid) {
  SupportBox b;
  b.end = {grid.n(0), grid.ndim() == 2 ? grid.n(1) : 1};
  return b;
}

SupportBox SupportBox::centered(const Grid& grid, std::size_t count) {
  SupportBox b;
  for (int a = 0; a < 2; ++a) {
    const auto ia = static_cast<std::size_t>(a);
    if (a >= grid.ndim()) {
      b.begin[ia] = 0;
      b.end[ia] = 1;
      continue;
    }
    const std::size_t n = grid.n(a);
    if (count > n) throw ValidationError("support box larger than grid");
    b.begin[ia] = n / 2 - count / 2;
    b.end[ia] = b.begin[ia] + count;
  }
  return b;
}

bool SupportBox::contains(const Grid& grid, std::size_t flat_index) const {
  if (grid.ndim() == 1) return flat_index >= begin[0] && flat_index < end[0];
  const std::size_t cols = grid.n(1);
  const std::size_t r = flat_index / cols;
  const std::size_t c = flat_index % cols;
  return r >= begin[0] && r < end[0] && c >= begin[1] && c < end[1];
}

std::size_t SupportBox::count(const Grid& grid) const {
  if (grid.ndim() == 1) return end[0] - begin[0];
  return (end[0] - begin[0]) * (end[1] - begin[1]);
}

void SupportBox::validate(const Grid& grid) const {
  for (int a = 0; a < grid.ndim(); ++a) {
    const auto ia = static_cast<std::size_t>(a);
    if (begin[ia] >= end[ia] || end[ia] > grid.n(a)) {
      throw ValidationError("support box is empty or exceeds the grid on axis " + std::to_string(a));
    }
  }
}

ComplexField::ComplexField(Grid g, cplx fill) : grid(g), values(g.size(), fill) {}

ComplexField::ComplexField(Grid g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) throw ValidationError("field length does not match grid");
}

void ComplexField::validate() const {
  if (values.size() != grid.size() || grid.size() == 0) {
    throw ValidationError("field length does not match grid");
  }
  for (const auto& v : values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw ValidationError("field contains non-finite samples");
    }
  }
}

RealImage::RealImage(Grid g, double fill) : grid(g), values(g.size(), fill) {}

RealImage::RealImage(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) throw ValidationError("image length does not match grid");
}

void RealImage::validate() const {
  if (values.size() != grid.size() || grid.size() == 0) {
    throw ValidationError("image length does not match grid");
  }
  if (mask && mask->size() != values.size()) throw ValidationError("mask length does not match image");
  for (double v : values) {
    if (!std::isfinite(v)) throw ValidationError("image contains non-finite samples");
  }
}

std::vector<std::uint8_t> make_mask(const Grid& grid, const MaskWindow& window) {
  SupportBox box;
  box.begin = window.begin;
  box.end = window.end;
  if (grid.ndim() == 1) {
    box.begin[1] = 0;
    box.end[1] = 1;
  }
  box.validate(grid);
  std::vector<std::uint8_t> mask(grid.size(), 0);
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = box.contains(grid, i) ? 1 : 0;
  return mask;
}

std::vector<std::uint8_t> centered_mask(const Grid& grid, double fraction) {
  if (!(fraction > 0.0) || fraction > 1.0) throw ValidationError("mask fraction must lie in (0, 1]");
  MaskWindow w;
  for (int a = 0; a < grid.ndim(); ++a) {
    const auto ia = static_cast<std::size_t>(a);
    const std::size_t n = grid.n(a);
    const auto count = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n))));
    w.begin[ia] = n / 2 - count / 2;
    w.end[ia] = w.begin[ia] + count;
  }
  return make_mask(grid, w);
}

double l2_norm(std::span<const cplx> v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double relative_error(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw ValidationError("relative_error: length mismatch");
  double num = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) num += std::norm(a[i] - b[i]);
  const double den = l2_norm(b);
  return den > 0.0 ? std::sqrt(num) / den : std::sqrt(num);
}

double relative_error(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("relative_error: length mismatch");
  double num = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) num += (a[i] - b[i]) * (a[i] - b[i]);
  const double den = l2_norm(b);
  return den > 0.0 ? std::sqrt(num) / den : std::sqrt(num);
}

double max_abs_diff(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw ValidationError("max_abs_diff: length mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("max_abs_diff: length mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace pci
