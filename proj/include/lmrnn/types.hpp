#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace lmrnn {

/// Consecutive train / validation / test blocks starting at row 0.
struct Split {
  std::size_t n_train = 0;
  std::size_t n_val = 0;
  std::size_t n_test = 0;

  [[nodiscard]] std::size_t total() const noexcept { return n_train + n_val + n_test; }
  [[nodiscard]] std::size_t val_begin() const noexcept { return n_train; }
  [[nodiscard]] std::size_t test_begin() const noexcept { return n_train + n_val; }
};

/// Real-valued series, one row per time point and one column per coordinate.
struct TimeSeries {
  Eigen::MatrixXd values;
  std::vector<std::string> names;
  std::optional<Split> split;

  TimeSeries() = default;
  explicit TimeSeries(Eigen::MatrixXd v, std::vector<std::string> column_names = {});
  static TimeSeries univariate(const std::vector<double>& x, std::string name = "y");

  [[nodiscard]] std::size_t length() const noexcept {
    return static_cast<std::size_t>(values.rows());
  }
  [[nodiscard]] std::size_t dims() const noexcept {
    return static_cast<std::size_t>(values.cols());
  }
  [[nodiscard]] std::vector<double> column(std::size_t c) const;
};

/// Elementwise nonlinearities shared by generators, cells and checkers.
enum class Activation { kIdentity, kRelu, kSigmoid, kTanh, kSoftmax };

[[nodiscard]] std::string_view to_string(Activation a);
[[nodiscard]] Activation parse_activation(std::string_view name);
[[nodiscard]] bool is_bounded(Activation a);

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Applies `a` to every entry. Softmax normalises the whole vector.
[[nodiscard]] Eigen::VectorXd activate(Activation a, const Eigen::VectorXd& pre);

}  // namespace lmrnn
