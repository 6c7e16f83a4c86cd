#pragma once

#include <Eigen/Core>

#include "lmrnn/errors.hpp"
#include "lmrnn/networks.hpp"

namespace lmrnn::detail {

// Derivative of an elementwise activation expressed through its output.
inline double activation_grad_from_output(Activation a, double y) {
  switch (a) {
    case Activation::kIdentity: return 1.0;
    case Activation::kRelu: return y > 0.0 ? 1.0 : 0.0;
    case Activation::kSigmoid: return y * (1.0 - y);
    case Activation::kTanh: return 1.0 - y * y;
    case Activation::kSoftmax: break;
  }
  throw ConfigError("softmax is not supported as an elementwise cell activation");
}

inline Eigen::VectorXd activation_grad(Activation a, const Eigen::VectorXd& y) {
  return y.unaryExpr([a](double v) { return activation_grad_from_output(a, v); });
}

inline void check_elementwise(Activation a) {
  if (a == Activation::kSoftmax) {
    throw ConfigError("softmax is not supported as an elementwise cell activation");
  }
}

inline Eigen::VectorXd sigmoid_vec(const Eigen::VectorXd& pre) {
  return pre.unaryExpr([](double v) { return sigmoid(v); });
}

inline void check_finite(const Eigen::VectorXd& v, std::size_t t, const char* what) {
  if (!v.allFinite()) throw DivergenceError(std::string("forward diverged: non-finite ") + what, t);
}

Gradients zero_gradients(const CellParams& params);

// Output layer z = g(pre_z); accumulates dW_zh, db_z and returns dpre_z.
Eigen::VectorXd output_backward(const CellParams& params, const StateCache& cache,
                                const Eigen::MatrixXd& output_grads, Eigen::Index t,
                                Gradients& g);

ForwardResult forward_rnn_family(const CellParams& params, const Eigen::MatrixXd& inputs);
Gradients backward_rnn_family(const CellParams& params, const StateCache& cache,
                              const Eigen::MatrixXd& output_grads);
ForwardResult forward_lstm_family(const CellParams& params, const Eigen::MatrixXd& inputs);
Gradients backward_lstm_family(const CellParams& params, const StateCache& cache,
                               const Eigen::MatrixXd& output_grads);

}  // namespace lmrnn::detail
