#include "pci/fourier.hpp"

#include "pci/errors.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

namespace pci {

namespace {

// FFTW planning is not thread-safe; execution of an existing plan is.
class PlanCache {
public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(const Grid& grid, int sign) {
    const Key key{grid.ndim(), grid.n(0), grid.ndim() == 2 ? grid.n(1) : 1, sign};
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    std::vector<cplx> scratch(grid.size());
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = grid.ndim() == 1
                         ? fftw_plan_dft_1d(static_cast<int>(grid.n(0)), buf, buf, sign, flags)
                         : fftw_plan_dft_2d(static_cast<int>(grid.n(0)), static_cast<int>(grid.n(1)),
                                            buf, buf, sign, flags);
    if (plan == nullptr) throw Error("FFTW failed to create a plan");
    plans_.emplace(key, plan);
    return plan;
  }

private:
  using Key = std::tuple<int, std::size_t, std::size_t, int>;
  std::mutex mutex_;
  std::map<Key, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

// For even n, exp(-i xi_l x_j) with centered indices factors into
// (-1)^{n/2} (-1)^l (-1)^j exp(-2 pi i l j / n). The sign ramps are exact.
void apply_checkerboard(std::vector<cplx>& v, const Grid& grid) {
  if (grid.ndim() == 1) {
    for (std::size_t j = 1; j < v.size(); j += 2) v[j] = -v[j];
    return;
  }
  const std::size_t rows = grid.n(0);
  const std::size_t cols = grid.n(1);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if ((r + c) % 2 == 1) v[r * cols + c] = -v[r * cols + c];
    }
  }
}

ComplexField centered_transform(const ComplexField& f, int sign) {
  f.validate();
  const Grid& grid = f.grid;
  std::vector<cplx> work = f.values;
  apply_checkerboard(work, grid);
  auto* buf = reinterpret_cast<fftw_complex*>(work.data());
  fftw_execute_dft(plan_cache().get(grid, sign), buf, buf);
  apply_checkerboard(work, grid);

  double scale = 1.0;
  int half_sum = 0;
  for (int a = 0; a < grid.ndim(); ++a) {
    scale *= grid.spacing(a) / std::sqrt(2.0 * std::numbers::pi);
    half_sum += static_cast<int>(grid.n(a) / 2);
  }
  if (half_sum % 2 != 0) scale = -scale;
  for (auto& v : work) v *= scale;
  return ComplexField(grid.dual(), std::move(work));
}

}  // namespace

ComplexField fourier_transform(const ComplexField& f) {
  return centered_transform(f, FFTW_FORWARD);
}

ComplexField inverse_fourier_transform(const ComplexField& g) {
  return centered_transform(g, FFTW_BACKWARD);
}

namespace {

Grid padded_grid(const Grid& g, int factor) {
  const auto f = static_cast<std::size_t>(factor);
  return g.ndim() == 1 ? Grid::line(g.n(0) * f, g.spacing(0))
                       : Grid::plane(g.n(0) * f, g.n(1) * f, g.spacing(0), g.spacing(1));
}

template <typename T>
std::vector<T> embed(const std::vector<T>& src, const Grid& from, const Grid& to, T fill) {
  std::vector<T> out(to.size(), fill);
  if (from.ndim() == 1) {
    const std::size_t off = to.n(0) / 2 - from.n(0) / 2;
    for (std::size_t j = 0; j < from.n(0); ++j) out[off + j] = src[j];
    return out;
  }
  const std::size_t r0 = to.n(0) / 2 - from.n(0) / 2;
  const std::size_t c0 = to.n(1) / 2 - from.n(1) / 2;
  for (std::size_t r = 0; r < from.n(0); ++r) {
    for (std::size_t c = 0; c < from.n(1); ++c) {
      out[(r + r0) * to.n(1) + c + c0] = src[r * from.n(1) + c];
    }
  }
  return out;
}

template <typename T>
std::vector<T> extract(const std::vector<T>& src, const Grid& from, const Grid& to) {
  std::vector<T> out(to.size());
  if (from.ndim() == 1) {
    const std::size_t off = from.n(0) / 2 - to.n(0) / 2;
    for (std::size_t j = 0; j < to.n(0); ++j) out[j] = src[off + j];
    return out;
  }
  const std::size_t r0 = from.n(0) / 2 - to.n(0) / 2;
  const std::size_t c0 = from.n(1) / 2 - to.n(1) / 2;
  for (std::size_t r = 0; r < to.n(0); ++r) {
    for (std::size_t c = 0; c < to.n(1); ++c) {
      out[r * to.n(1) + c] = src[(r + r0) * from.n(1) + c + c0];
    }
  }
  return out;
}

void check_crop(const Grid& from, const Grid& to) {
  if (from.ndim() != to.ndim()) throw ValidationError("crop: dimension mismatch");
  for (int a = 0; a < from.ndim(); ++a) {
    if (to.n(a) > from.n(a)) throw ValidationError("crop: target larger than source");
    if (std::abs(to.spacing(a) - from.spacing(a)) > 1e-12 * from.spacing(a)) {
      throw ValidationError("crop: spacing mismatch");
    }
  }
}

}  // namespace

ComplexField pad_field(const ComplexField& f, int factor, cplx fill) {
  if (factor < 1) throw ValidationError("pad factor must be >= 1");
  if (factor == 1) return f;
  const Grid to = padded_grid(f.grid, factor);
  return ComplexField(to, embed(f.values, f.grid, to, fill));
}

RealImage pad_image(const RealImage& f, int factor, double fill) {
  if (factor < 1) throw ValidationError("pad factor must be >= 1");
  if (factor == 1) return f;
  const Grid to = padded_grid(f.grid, factor);
  RealImage out(to, embed(f.values, f.grid, to, fill));
  if (f.mask) out.mask = embed(*f.mask, f.grid, to, std::uint8_t{0});
  return out;
}

ComplexField crop_field(const ComplexField& f, const Grid& target) {
  check_crop(f.grid, target);
  return ComplexField(target, extract(f.values, f.grid, target));
}

RealImage crop_image(const RealImage& f, const Grid& target) {
  check_crop(f.grid, target);
  RealImage out(target, extract(f.values, f.grid, target));
  if (f.mask) out.mask = extract(*f.mask, f.grid, target);
  return out;
}

std::size_t reflected_index(const Grid& grid, std::size_t i) {
  if (grid.ndim() == 1) {
    const std::size_t n = grid.n(0);
    return (n - i) % n;
  }
  const std::size_t rows = grid.n(0);
  const std::size_t cols = grid.n(1);
  const std::size_t r = i / cols;
  const std::size_t c = i % cols;
  return ((rows - r) % rows) * cols + (cols - c) % cols;
}

ComplexField reflect(const ComplexField& f) {
  ComplexField out(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) out[reflected_index(f.grid, i)] = f[i];
  return out;
}

}  // namespace pci
