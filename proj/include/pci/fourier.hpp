#pragma once

#include "pci/grid.hpp"

namespace pci {

/// Unitary angular-frequency Fourier transform on centered grids,
///
///   F(f)(xi_l) = dx^m (2 pi)^{-m/2} sum_j f_j exp(-i xi_l . x_j),
///
/// evaluated with an FFT. The result lives on `f.grid.dual()`, and
/// sum |F f|^2 dxi^m == sum |f|^2 dx^m up to rounding.
ComplexField fourier_transform(const ComplexField& f);

/// Exact inverse of fourier_transform; `g` is interpreted on a dual grid and
/// the result lives on `g.grid.dual()`.
ComplexField inverse_fourier_transform(const ComplexField& g);

/// Centered embedding into a grid `factor` times larger per axis.
ComplexField pad_field(const ComplexField& f, int factor, cplx fill);
RealImage pad_image(const RealImage& f, int factor, double fill);

/// Central window of `f` with the shape of `target` (spacings must match).
ComplexField crop_field(const ComplexField& f, const Grid& target);
RealImage crop_image(const RealImage& f, const Grid& target);

/// f(-x) on the periodic grid: sample j maps to (n - j) mod n per axis.
ComplexField reflect(const ComplexField& f);

/// Flat index of sample (-x) for the sample at flat index i.
std::size_t reflected_index(const Grid& grid, std::size_t i);

}  // namespace pci
