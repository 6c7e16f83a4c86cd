#include "lmrnn/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "lmrnn/errors.hpp"
#include "lmrnn/spectral.hpp"

namespace lmrnn {
namespace {

std::vector<double> centred(std::span<const double> x) {
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  std::vector<double> out(x.size());
  std::transform(x.begin(), x.end(), out.begin(), [mean](double v) { return v - mean; });
  return out;
}

}  // namespace

AcfResult acf(std::span<const double> series, std::size_t max_lag) {
  const std::size_t n = series.size();
  if (max_lag < 1) throw DomainError("acf: max_lag must be >= 1");
  if (n <= max_lag) {
    throw InsufficientDataError("acf: series length " + std::to_string(n) +
                                " must exceed max_lag " + std::to_string(max_lag));
  }
  const auto x = centred(series);
  AcfResult r;
  r.lags.resize(max_lag + 1);
  r.autocovariance.resize(max_lag + 1);
  r.autocorrelation.resize(max_lag + 1);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k <= max_lag; ++k) {
    double acc = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) acc += x[t] * x[t + k];
    r.lags[k] = k;
    r.autocovariance[k] = acc * inv_n;
  }
  const double g0 = r.autocovariance[0];
  if (!(g0 > 0.0)) throw DegenerateSeriesError("acf: series is constant");
  for (std::size_t k = 0; k <= max_lag; ++k) r.autocorrelation[k] = r.autocovariance[k] / g0;
  r.autocorrelation[0] = 1.0;
  return r;
}

double SpectrumResult::full_circle_mean() const {
  if (n == 0) return 0.0;
  double acc = 0.0;
  for (std::size_t j = 0; j < ordinates.size(); ++j) {
    const bool nyquist = (n % 2 == 0) && (j + 1 == n / 2);
    acc += nyquist ? ordinates[j] : 2.0 * ordinates[j];
  }
  return acc / static_cast<double>(n);
}

SpectrumResult periodogram(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 16) {
    throw InsufficientDataError("periodogram: need at least 16 observations, got " +
                                std::to_string(n));
  }
  const auto x = centred(series);
  if (std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; })) {
    throw DegenerateSeriesError("periodogram: series is constant");
  }
  const auto power = spectral::power_spectrum(x);
  SpectrumResult s;
  s.n = n;
  const std::size_t half = n / 2;
  s.frequencies.resize(half);
  s.ordinates.resize(half);
  const double norm = 1.0 / (2.0 * std::numbers::pi * static_cast<double>(n));
  for (std::size_t j = 1; j <= half; ++j) {
    s.frequencies[j - 1] = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    s.ordinates[j - 1] = power[j] * norm;
  }
  return s;
}

std::string_view to_string(DecayKind k) {
  switch (k) {
    case DecayKind::kExponential: return "exponential";
    case DecayKind::kPolynomial: return "polynomial";
    case DecayKind::kUndecided: return "undecided";
  }
  return "undecided";
}

std::string_view to_string(MemoryKind k) {
  return k == MemoryKind::kLong ? "long-memory" : "short-memory";
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ShapeError("fit_line: need >= 2 paired points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  if (sxx == 0.0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

DecayClass classify_decay(std::span<const double> coeffs, std::size_t tail_start) {
  const std::size_t start = std::max<std::size_t>(tail_start, 1);
  std::vector<double> k;
  std::vector<double> logk;
  std::vector<double> logc;
  DecayClass out;
  for (std::size_t i = start; i < coeffs.size(); ++i) {
    const double a = std::abs(coeffs[i]);
    if (a == 0.0) {
      ++out.excluded_zeros;
      continue;
    }
    if (!std::isfinite(a)) continue;
    k.push_back(static_cast<double>(i));
    logk.push_back(std::log(static_cast<double>(i)));
    logc.push_back(std::log(a));
  }
  out.used_points = k.size();
  if (k.size() < 20) {
    throw InsufficientDataError("classify_decay: " + std::to_string(k.size()) +
                                " usable tail points, need 20");
  }
  const auto expo = fit_line(k, logc);
  const auto poly = fit_line(logk, logc);
  out.r2_exponential = expo.r2;
  out.r2_polynomial = poly.r2;
  out.log_slope = expo.slope;
  out.loglog_slope = poly.slope;
  if (expo.r2 < kDecayR2Threshold && poly.r2 < kDecayR2Threshold) {
    out.kind = DecayKind::kUndecided;
  } else if (expo.r2 > poly.r2) {
    out.kind = DecayKind::kExponential;
    out.rate = std::exp(expo.slope);
  } else {
    out.kind = DecayKind::kPolynomial;
    out.rate = poly.slope;
  }
  return out;
}

double linf_norm(const Eigen::MatrixXd& W) {
  if (W.size() == 0) return 0.0;
  return W.cwiseAbs().rowwise().sum().maxCoeff();
}

double spectral_radius(const Eigen::MatrixXd& W, double tol) {
  if (W.rows() != W.cols()) {
    throw ShapeError("spectral_radius: matrix is " + std::to_string(W.rows()) + "x" +
                     std::to_string(W.cols()));
  }
  if (!(tol > 0.0)) throw DomainError("spectral_radius: tol must be positive");
  if (W.size() == 0) return 0.0;
  if (!W.allFinite()) throw DomainError("spectral_radius: non-finite entries");

  // A holds W^s / exp(log_scale).
  Eigen::MatrixXd A = W;
  const auto n = static_cast<double>(W.rows());
  double log_scale = 0.0;
  double s = 1.0;
  double prev = -1.0;
  double est = 0.0;
  for (int m = 0; m <= 40; ++m) {
    const double norm1 = A.cwiseAbs().colwise().sum().maxCoeff();
    if (norm1 == 0.0) return 0.0;  // nilpotent
    est = std::exp((std::log(norm1) + log_scale) / s);
    // W^n = 0 for nilpotent W, so agreement only counts once s >= n.
    if (prev > 0.0 && s >= n && std::abs(est - prev) <= tol * est) break;
    prev = est;
    A /= norm1;
    log_scale += std::log(norm1);
    A = A * A;
    log_scale *= 2.0;
    s *= 2.0;
  }
  return est;
}

LineFit acf_loglog_slope(const AcfResult& r, std::size_t lag_lo, std::size_t lag_hi) {
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t k = std::max<std::size_t>(lag_lo, 1);
       k <= lag_hi && k < r.autocorrelation.size(); ++k) {
    if (r.autocorrelation[k] <= 0.0) continue;
    x.push_back(std::log(static_cast<double>(k)));
    y.push_back(std::log(r.autocorrelation[k]));
  }
  if (x.size() < 2) throw InsufficientDataError("acf_loglog_slope: fewer than 2 positive lags");
  return fit_line(x, y);
}

LineFit periodogram_loglog_slope(const SpectrumResult& spec, std::size_t count) {
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t j = 0; j < count && j < spec.ordinates.size(); ++j) {
    if (spec.ordinates[j] <= 0.0) continue;
    x.push_back(std::log(spec.frequencies[j]));
    y.push_back(std::log(spec.ordinates[j]));
  }
  if (x.size() < 2) throw InsufficientDataError("periodogram_loglog_slope: too few ordinates");
  return fit_line(x, y);
}

MemoryClass classify_memory(std::span<const double> series) {
  const auto spec = periodogram(series);
  const auto m = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(series.size()))));
  if (m < 4) {
    throw InsufficientDataError("classify_memory: series too short for a low-frequency fit");
  }
  const auto fit = periodogram_loglog_slope(spec, m);
  MemoryClass mc;
  mc.frequencies_used = m;
  mc.d_hat = -fit.slope / 2.0;
  mc.d_se = std::numbers::pi / std::sqrt(24.0 * static_cast<double>(m));
  mc.kind = (mc.d_hat > 0.1 && mc.d_hat > 3.0 * mc.d_se) ? MemoryKind::kLong : MemoryKind::kShort;
  return mc;
}

}  // namespace lmrnn
