#pragma once

// Synthetic series: ARFIMA(p, d, q) and recurrent network processes fed by
// their own previous output.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lmrnn/types.hpp"

namespace lmrnn {

/// (1 - sum phi_i B^i)(1 - B)^d Y_t = (1 + sum theta_j B^j) eps_t.
/// The benchmark model (1 - 0.7B + 0.4B^2)(1 - B)^0.4 Y = (1 - 0.2B) eps has
/// ar = {0.7, -0.4}, ma = {-0.2}.
struct ArfimaSpec {
  std::vector<double> ar;
  std::vector<double> ma;
  double d = 0.0;
  double noise_std = 1.0;
  std::size_t burn_in = 2000;
  /// Length of the truncated (1 - B)^{-d} expansion; 0 means the whole
  /// simulated path (burn-in included), otherwise at least 1000.
  std::size_t truncation = 0;
};

[[nodiscard]] ArfimaSpec arfima_preset_spec();

/// Throws DomainError for n == 0, d outside [0, 0.5), noise_std < 0, a
/// truncation below 1000, or a non-stationary AR polynomial.
[[nodiscard]] TimeSeries generate_arfima(const ArfimaSpec& spec, std::size_t n,
                                         std::uint64_t seed);

enum class ProcessKind { kLinearMc, kRnn, kLstm };
[[nodiscard]] std::string to_string(ProcessKind k);
[[nodiscard]] ProcessKind parse_process_kind(const std::string& name);

/// Recurrent network process with x^t = y^{t-1} and y^0 = h^0 = 0.
///
///   linear-mc  (y, h)^t = W (y, h)^{t-1} + (eps, 0), W of size (p+q)^2
///   rnn        h = act(W_hh h + W_hy y + b_h), y = out(W_zh h + b_z) + eps
///   lstm       gates on (h, y) as in the lstm cell, y = out(W_zh h + b_z) + eps
///
/// Tensor names: linear-mc "W"; rnn W_hh W_hy b_h W_zh b_z; lstm W_fh W_fy
/// W_ih W_iy W_oh W_oy W_ch W_cy b_f b_i b_o b_c W_zh b_z.
struct ProcessSpec {
  ProcessKind kind = ProcessKind::kRnn;
  std::size_t p = 1;
  std::size_t q = 1;
  std::map<std::string, Eigen::MatrixXd, std::less<>> tensors;
  Activation activation = Activation::kTanh;
  Activation output_function = Activation::kIdentity;
  double noise_std = 1.0;

  /// Throws ShapeError on missing or misshapen tensors.
  void validate() const;
};

/// Absolute state value treated as divergence.
inline constexpr double kDivergenceBound = 1e20;

/// Throws DivergenceError naming the first step whose state is non-finite or
/// exceeds kDivergenceBound in magnitude.
[[nodiscard]] TimeSeries generate_network_process(const ProcessSpec& spec, std::size_t n,
                                                  std::uint64_t seed);

/// tanh RNN process with weights drawn uniformly from [-scale, scale] using
/// the spec stream of `seed`.
[[nodiscard]] ProcessSpec random_rnn_process(std::size_t p, std::size_t q, double scale,
                                             std::uint64_t seed);

/// Short-memory control used by the experiments: random_rnn_process(1, 4, 0.9, 7).
[[nodiscard]] ProcessSpec rnn_process_preset();

}  // namespace lmrnn
