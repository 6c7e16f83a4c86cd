#include "lmrnn/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <memory>
#include <mutex>

namespace lmrnn::spectral {
namespace {

// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
  return FftwBuffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1))));
}

struct Plan {
  fftw_plan plan = nullptr;
  ~Plan() {
    if (plan != nullptr) {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan);
    }
  }
};

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Forward real transform of `in` zero-padded to n; returns n/2+1 bins.
std::vector<std::complex<double>> rfft(std::span<const double> in, std::size_t n) {
  auto buf = fftw_buffer<double>(n);
  auto out = fftw_buffer<fftw_complex>(n / 2 + 1);
  Plan p;
  {
    std::lock_guard lock(planner_mutex());
    p.plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), buf.get(), out.get(), FFTW_ESTIMATE);
  }
  std::fill(buf.get(), buf.get() + n, 0.0);
  std::copy(in.begin(), in.end(), buf.get());
  fftw_execute(p.plan);
  std::vector<std::complex<double>> result(n / 2 + 1);
  for (std::size_t j = 0; j < result.size(); ++j) result[j] = {out[j][0], out[j][1]};
  return result;
}

}  // namespace

std::vector<double> causal_convolve(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  if (n == 0 || b.empty()) return std::vector<double>(n, 0.0);
  const std::size_t m = std::min(b.size(), n);

  // Direct sum is exact enough and faster for short filters.
  if (m <= 64 || n * m <= (std::size_t{1} << 22)) {
    std::vector<double> out(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      const std::size_t jmax = std::min(t + 1, m);
      double acc = 0.0;
      for (std::size_t j = 0; j < jmax; ++j) acc += b[j] * a[t - j];
      out[t] = acc;
    }
    return out;
  }

  const std::size_t len = next_pow2(n + m - 1);
  auto fa = rfft(a, len);
  const auto fb = rfft(b.first(m), len);
  for (std::size_t j = 0; j < fa.size(); ++j) fa[j] *= fb[j];

  auto spec = fftw_buffer<fftw_complex>(len / 2 + 1);
  auto buf = fftw_buffer<double>(len);
  Plan p;
  {
    std::lock_guard lock(planner_mutex());
    p.plan = fftw_plan_dft_c2r_1d(static_cast<int>(len), spec.get(), buf.get(), FFTW_ESTIMATE);
  }
  for (std::size_t j = 0; j < fa.size(); ++j) {
    spec[j][0] = fa[j].real();
    spec[j][1] = fa[j].imag();
  }
  fftw_execute(p.plan);
  std::vector<double> out(n);
  const double scale = 1.0 / static_cast<double>(len);
  for (std::size_t t = 0; t < n; ++t) out[t] = buf[t] * scale;
  return out;
}

std::vector<double> power_spectrum(std::span<const double> x) {
  const std::size_t n = x.size();
  const auto f = rfft(x, n);
  std::vector<double> out(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) out[j] = std::norm(f[j]);
  return out;
}

}  // namespace lmrnn::spectral
