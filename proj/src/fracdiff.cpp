#include "lmrnn/fracdiff.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lmrnn/errors.hpp"
#include "lmrnn/spectral.hpp"

namespace lmrnn {
namespace {

void check_memory_value(double d) {
  if (!(d > 0.0 && d < 0.5)) {
    throw DomainError("memory parameter must lie in (0, 0.5), got " + std::to_string(d));
  }
}

void check_weight_domain(double d, std::size_t K) {
  if (!(d > 0.0 && d < 1.0)) {
    throw DomainError("frac_weights: d must lie in (0, 1), got " + std::to_string(d));
  }
  if (K == 0) throw DomainError("frac_weights: truncation lag K must be >= 1");
}

}  // namespace

MemoryParam::MemoryParam(double d) : d_{d} { check_memory_value(d); }

MemoryParam::MemoryParam(std::vector<double> d) : d_(std::move(d)) {
  if (d_.empty()) throw DomainError("memory parameter vector is empty");
  for (double v : d_) check_memory_value(v);
}

void fill_frac_weights(double d, std::span<double> w, std::span<double> dw) {
  if (w.empty()) return;
  const bool grad = !dw.empty();
  w[0] = 1.0;
  if (grad) dw[0] = 0.0;
  for (std::size_t j = 1; j < w.size(); ++j) {
    const double jj = static_cast<double>(j);
    const double factor = (jj - 1.0 - d) / jj;
    if (grad) dw[j] = dw[j - 1] * factor - w[j - 1] / jj;
    w[j] = w[j - 1] * factor;
  }
}

FracWeights frac_weights(double d, std::size_t K) {
  check_weight_domain(d, K);
  FracWeights fw;
  fw.d = d;
  fw.K = K;
  fw.w.resize(K + 1);
  fw.dw.resize(K + 1);
  fill_frac_weights(d, fw.w, fw.dw);
  return fw;
}

std::vector<double> frac_weights_grad(double d, std::size_t K) {
  return frac_weights(d, K).dw;
}

std::vector<double> frac_integration_weights(double d, std::size_t n) {
  std::vector<double> psi(n, 0.0);
  if (n == 0) return psi;
  psi[0] = 1.0;
  if (d == 0.0) return psi;
  for (std::size_t j = 1; j < n; ++j) {
    const double jj = static_cast<double>(j);
    psi[j] = psi[j - 1] * (jj - 1.0 + d) / jj;
  }
  return psi;
}

double apply_memory_filter(std::span<const double> history, double d, std::size_t K) {
  if (d == 0.0) return 0.0;
  const auto fw = frac_weights(d, K);
  double acc = 0.0;
  const std::size_t n = std::min(K, history.size());
  for (std::size_t j = 1; j <= n; ++j) acc += fw.w[j] * history[j - 1];
  return acc;
}

Eigen::VectorXd apply_memory_filter(const Eigen::MatrixXd& window, const MemoryParam& d,
                                    std::size_t K) {
  if (static_cast<std::size_t>(window.cols()) != d.size()) {
    throw ShapeError("apply_memory_filter: window has " + std::to_string(window.cols()) +
                     " columns but d has " + std::to_string(d.size()) + " entries");
  }
  Eigen::VectorXd out(window.cols());
  std::vector<double> column(static_cast<std::size_t>(window.rows()));
  for (Eigen::Index c = 0; c < window.cols(); ++c) {
    for (Eigen::Index r = 0; r < window.rows(); ++r) column[r] = window(r, c);
    out[c] = apply_memory_filter(column, d[static_cast<std::size_t>(c)], K);
  }
  return out;
}

std::vector<double> apply_fracdiff(std::span<const double> series, double d, std::size_t K) {
  if (d == 0.0) return {series.begin(), series.end()};
  const auto fw = frac_weights(d, K);
  std::vector<double> out(series.size(), 0.0);
  for (std::size_t t = 0; t < series.size(); ++t) {
    const std::size_t jmax = std::min(t, K);
    double acc = 0.0;
    for (std::size_t j = 0; j <= jmax; ++j) acc += fw.w[j] * series[t - j];
    out[t] = acc;
  }
  return out;
}

std::vector<double> apply_fracint(std::span<const double> series, double d, std::size_t truncation) {
  if (d == 0.0) return {series.begin(), series.end()};
  if (!(d > 0.0 && d < 0.5)) {
    throw DomainError("apply_fracint: d must lie in [0, 0.5), got " + std::to_string(d));
  }
  const std::size_t L =
      truncation == 0 ? series.size() : std::min(truncation, series.size());
  const auto psi = frac_integration_weights(d, L);
  return spectral::causal_convolve(series, psi);
}

}  // namespace lmrnn
