#pragma once

// Impulse responses y^t = sum_k A_k x^{t-k} of linearised cells (identity
// activations and output, biases dropped).

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "lmrnn/networks.hpp"

namespace lmrnn {

/// A_0..A_lags, each p_z x p_x.
///
///   rnn                A_k = W_zh W_hh^k W_hx
///   mrnnf              A_k = C_k + D_k, C_k as for rnn and
///                      D_k = sum_{s<=k} W_zm W_mm^s W_mf G_{k-s},
///                      G_k = diag(w_{k+1}(d)) for k < K (the filter uses x^{t-j+1})
///   const-gates-lstm   A_k = W_zh D_o M^k D_i W_cx, M = D_f + D_i W_ch D_o
///   const-gates-mlstm  A_k = W_zh D_o Theta_k D_i W_cx (see theta_coefficients)
///
/// Throws ConfigError for other kinds and DomainError for lags == 0.
[[nodiscard]] std::vector<Eigen::MatrixXd> impulse_response(const CellParams& params,
                                                            std::size_t lags);

/// Theta_0 = I, Theta_k = C Theta_{k-1} - sum_{j=1}^{min(k,K)} W_j Theta_{k-j},
/// W_j = diag(w_j(d_i)): the expansion of ((I - B)^d - C B)^{-1} with the
/// filter truncated at K.
[[nodiscard]] std::vector<Eigen::MatrixXd> theta_coefficients(const Eigen::MatrixXd& C,
                                                              const Eigen::VectorXd& d,
                                                              std::size_t K, std::size_t lags);

/// Entry (i, j) of every A_k as a sequence indexed by k.
[[nodiscard]] std::vector<double> impulse_entry(const std::vector<Eigen::MatrixXd>& A,
                                                Eigen::Index i, Eigen::Index j);

}  // namespace lmrnn
