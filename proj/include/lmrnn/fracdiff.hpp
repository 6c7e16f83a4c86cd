#pragma once

// Fractional differencing: coefficients of the binomial expansion
//   (1 - B)^d = sum_j w_j(d) B^j,   w_j(d) = prod_{i<j} (i - d) / (i + 1),
// their derivatives in d, and the filters built from them.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace lmrnn {

inline constexpr std::size_t kDefaultFilterLag = 100;

/// A memory parameter d in (0, 0.5) for every coordinate.
class MemoryParam {
 public:
  explicit MemoryParam(double d);
  explicit MemoryParam(std::vector<double> d);

  [[nodiscard]] std::size_t size() const noexcept { return d_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return d_[i]; }
  [[nodiscard]] const std::vector<double>& values() const noexcept { return d_; }

 private:
  std::vector<double> d_;
};

/// Truncated coefficients w_0..w_K of (1 - B)^d and their d-derivatives.
struct FracWeights {
  double d = 0.0;
  std::size_t K = 0;
  std::vector<double> w;   // length K + 1, w[0] == 1
  std::vector<double> dw;  // length K + 1, dw[0] == 0
};

/// Requires 0 < d < 1 and K >= 1; throws DomainError otherwise.
[[nodiscard]] FracWeights frac_weights(double d, std::size_t K);

/// dw_0..dw_K by the coupled recurrence
///   dw_j = dw_{j-1} (j-1-d)/j - w_{j-1}/j.
[[nodiscard]] std::vector<double> frac_weights_grad(double d, std::size_t K);

/// Unchecked kernel shared by the networks: fills w[0..K] and, when dw is
/// non-empty, dw[0..K]. Valid for any finite d.
void fill_frac_weights(double d, std::span<double> w, std::span<double> dw);

/// Coefficients psi_0..psi_{n-1} of (1 - B)^{-d}, psi_j = psi_{j-1} (j-1+d)/j.
/// d == 0 gives the unit impulse.
[[nodiscard]] std::vector<double> frac_integration_weights(double d, std::size_t n);

/// sum_{j=1}^{K} w_j(d) x^{t-j+1}. `history` is most-recent-first
/// (history[0] = x^t); lags beyond its end are treated as zero.
/// d == 0 is the zero filter.
[[nodiscard]] double apply_memory_filter(std::span<const double> history, double d,
                                         std::size_t K);

/// Coordinate-wise filter with one d per column. `window` rows are lags
/// (row 0 = x^t), columns are coordinates.
[[nodiscard]] Eigen::VectorXd apply_memory_filter(const Eigen::MatrixXd& window,
                                                  const MemoryParam& d, std::size_t K);

/// out_t = sum_{j=0}^{min(t,K)} w_j(d) series_{t-j}. d == 0 returns the input.
[[nodiscard]] std::vector<double> apply_fracdiff(std::span<const double> series, double d,
                                                 std::size_t K);

/// out_t = sum_{j=0}^{min(t,L-1)} psi_j(d) series_{t-j} with L = truncation
/// (0 means the full series length), i.e. the truncated (1 - B)^{-d}.
[[nodiscard]] std::vector<double> apply_fracint(std::span<const double> series, double d,
                                                std::size_t truncation = 0);

}  // namespace lmrnn
