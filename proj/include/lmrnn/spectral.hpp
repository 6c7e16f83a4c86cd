#pragma once

// Thin FFTW wrappers used by the generators and diagnostics.

#include <span>
#include <vector>

namespace lmrnn::spectral {

/// First a.size() terms of the linear convolution of a and b.
[[nodiscard]] std::vector<double> causal_convolve(std::span<const double> a,
                                                  std::span<const double> b);

/// |X_j|^2 for the DFT X_j = sum_t x_t e^{-2 pi i j t / n}, j = 0..n/2.
[[nodiscard]] std::vector<double> power_spectrum(std::span<const double> x);

}  // namespace lmrnn::spectral
