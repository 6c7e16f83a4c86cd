#pragma once

// Memory-property measurements on observed series and coefficient sequences.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace lmrnn {

struct AcfResult {
  std::vector<std::size_t> lags;       // 0..L
  std::vector<double> autocovariance;  // biased (1/n) estimator
  std::vector<double> autocorrelation; // r_0 == 1
};

/// Sample autocovariance / autocorrelation up to `max_lag`.
/// Requires n > max_lag >= 1; a constant series raises DegenerateSeriesError.
[[nodiscard]] AcfResult acf(std::span<const double> series, std::size_t max_lag);

struct SpectrumResult {
  std::vector<double> frequencies;  // 2 pi j / n, j = 1..floor(n/2)
  std::vector<double> ordinates;    // I(lambda_j) >= 0
  std::size_t n = 0;                // series length

  /// Mean of I over all n Fourier frequencies, reconstructed from the
  /// stored half by conjugate symmetry (I(0) = 0 after centring). Equals
  /// gamma_0 / (2 pi) exactly.
  [[nodiscard]] double full_circle_mean() const;
};

/// I(lambda_j) = |sum_t (x_t - mean) e^{-i t lambda_j}|^2 / (2 pi n). Requires n >= 16.
[[nodiscard]] SpectrumResult periodogram(std::span<const double> series);

enum class DecayKind { kExponential, kPolynomial, kUndecided };
[[nodiscard]] std::string_view to_string(DecayKind k);

struct DecayClass {
  DecayKind kind = DecayKind::kUndecided;
  double rate = 0.0;        // rho for exponential, exponent for polynomial
  double r2_exponential = 0.0;
  double r2_polynomial = 0.0;
  double log_slope = 0.0;   // slope of log|c_k| on k
  double loglog_slope = 0.0;// slope of log|c_k| on log k
  std::size_t used_points = 0;
  std::size_t excluded_zeros = 0;
};

inline constexpr double kDecayR2Threshold = 0.8;
inline constexpr std::size_t kDefaultTailStart = 20;

/// Fits log|c_k| against k and against log k for k >= tail_start (index k of
/// `coeffs` is lag k) and keeps the better fit. Exact zeros are skipped.
/// Throws InsufficientDataError with fewer than 20 usable points.
[[nodiscard]] DecayClass classify_decay(std::span<const double> coeffs,
                                        std::size_t tail_start = kDefaultTailStart);

/// Least-squares line y = intercept + slope x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
[[nodiscard]] LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Spectral radius by Gelfand iteration ||W^s||_1^{1/s}, s = 2^m, with
/// renormalisation at every squaring. Stops when successive estimates agree
/// to relative `tol` or m reaches 40.
[[nodiscard]] double spectral_radius(const Eigen::MatrixXd& W, double tol = 1e-6);

/// Max absolute row sum.
[[nodiscard]] double linf_norm(const Eigen::MatrixXd& W);

enum class MemoryKind { kShort, kLong };
[[nodiscard]] std::string_view to_string(MemoryKind k);

/// Finite-sample memory label from the low-frequency periodogram slope:
/// a log-periodogram regression over the lowest m = floor(sqrt(n)) Fourier
/// frequencies gives d_hat = -slope/2 with standard error pi/sqrt(24 m).
/// The series is labelled long memory when d_hat > 0.1 and d_hat > 3 se.
struct MemoryClass {
  MemoryKind kind = MemoryKind::kShort;
  double d_hat = 0.0;
  double d_se = 0.0;
  std::size_t frequencies_used = 0;
};
[[nodiscard]] MemoryClass classify_memory(std::span<const double> series);

/// Slope of log r_k on log k over [lag_lo, lag_hi]; non-positive r_k are skipped.
[[nodiscard]] LineFit acf_loglog_slope(const AcfResult& acf, std::size_t lag_lo,
                                       std::size_t lag_hi);

/// Slope of log I on log lambda over the lowest `count` Fourier frequencies.
[[nodiscard]] LineFit periodogram_loglog_slope(const SpectrumResult& spec, std::size_t count);

}  // namespace lmrnn
