#pragma once

// Sufficient conditions for geometric ergodicity (hence short memory) of
// recurrent network processes. A failed condition never proves long memory;
// only the linear Markov chain has an exact criterion.

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "lmrnn/networks.hpp"

namespace lmrnn {

enum class Conclusion { kShortMemoryProven, kInconclusive, kNotGeometricallyErgodic };
[[nodiscard]] std::string_view to_string(Conclusion c);

struct Inequality {
  std::string name;  // e.g. "|w_hh| <= a"
  double lhs = 0.0;
  double bound = 0.0;
  bool satisfied = false;
};

struct Verdict {
  Conclusion conclusion = Conclusion::kInconclusive;
  std::string rule;  // which sufficient condition was applied
  std::vector<Inequality> checks;
  std::vector<std::string> premises;
};

inline constexpr double kDefaultContraction = 0.99;

/// RNN process y^t = g(W_zh h^t + b_z) + eps, h^t = act(W_hh h' + W_hy y' + b_h);
/// the cell tensor W_hx plays the role of W_hy.
///
/// A bounded activation (sigmoid, tanh) proves short memory for any weights.
/// Otherwise (identity, ReLU) p = q = 1 is required and the scalar
/// contraction conditions are evaluated:
///   identity output         |w_zh w_hh|, |w_zh w_hy|, |w_hh|, |w_hy| <= a
///   sigmoid/softmax output  |w_hh|, |w_hy| <= a
/// ReLU output uses the identity row and tanh output the sigmoid row.
/// Throws ConfigError for unbounded activations with p or q != 1 and
/// DomainError for a outside (0, 1).
[[nodiscard]] Verdict check_rnn_ergodicity(const CellParams& params, Activation output_fn,
                                           Activation activation_fn,
                                           double a = kDefaultContraction);
[[nodiscard]] Verdict check_rnn_ergodicity(const CellParams& params,
                                           double a = kDefaultContraction);

/// LSTM process with sigmoid gates and inputs scaled to [-1, 1]:
///   sigmoid(||W_fh||_inf + ||W_fy||_inf + ||b_f||_inf) <= a
/// plus, for p = q = 1 with sigmoid or softmax output,
///   |sigmoid(w_fh + w_fy + b_f)| <= a.
[[nodiscard]] Verdict check_lstm_ergodicity(const CellParams& params,
                                            double a = kDefaultContraction);

/// Linear chain s^t = W s^{t-1} + e^t: geometrically ergodic iff rho(W) < 1.
[[nodiscard]] Verdict check_linear_mc(const Eigen::MatrixXd& W);

[[nodiscard]] std::string verdict_to_json(const Verdict& v);

}  // namespace lmrnn
