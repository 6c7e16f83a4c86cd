#include "lmrnn/impulse.hpp"

#include <algorithm>
#include <string>

#include "lmrnn/errors.hpp"
#include "lmrnn/fracdiff.hpp"

namespace lmrnn {
namespace {

Eigen::MatrixXd diag_sigmoid(const Eigen::MatrixXd& theta) {
  return theta.col(0).unaryExpr([](double v) { return sigmoid(v); }).asDiagonal();
}

Eigen::VectorXd memory_values(const Eigen::MatrixXd& theta) {
  return theta.col(0).unaryExpr([](double v) { return memory_from_theta(v); });
}

// Weights w_0..w_K for every coordinate of d, stored row j = lag.
Eigen::MatrixXd filter_table(const Eigen::VectorXd& d, std::size_t K) {
  Eigen::MatrixXd table(static_cast<Eigen::Index>(K + 1), d.size());
  std::vector<double> w(K + 1);
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    fill_frac_weights(d[i], w, {});
    for (std::size_t j = 0; j <= K; ++j) table(static_cast<Eigen::Index>(j), i) = w[j];
  }
  return table;
}

}  // namespace

std::vector<Eigen::MatrixXd> theta_coefficients(const Eigen::MatrixXd& C, const Eigen::VectorXd& d,
                                                std::size_t K, std::size_t lags) {
  const Eigen::Index q = d.size();
  if (C.rows() != q || C.cols() != q) throw ShapeError("theta_coefficients: C must be q x q");
  const Eigen::MatrixXd w = filter_table(d, K);
  std::vector<Eigen::MatrixXd> theta;
  theta.reserve(lags + 1);
  theta.push_back(Eigen::MatrixXd::Identity(q, q));
  for (std::size_t k = 1; k <= lags; ++k) {
    Eigen::MatrixXd next = C * theta[k - 1];
    const std::size_t top = std::min(k, K);
    for (std::size_t j = 1; j <= top; ++j) {
      next.noalias() -= w.row(static_cast<Eigen::Index>(j)).transpose().asDiagonal() * theta[k - j];
    }
    theta.push_back(std::move(next));
  }
  return theta;
}

std::vector<Eigen::MatrixXd> impulse_response(const CellParams& params, std::size_t lags) {
  if (lags == 0) throw DomainError("impulse_response: lags must be positive");
  params.validate();
  std::vector<Eigen::MatrixXd> A;
  A.reserve(lags + 1);
  const auto p = static_cast<Eigen::Index>(params.dims.input);
  const auto q = static_cast<Eigen::Index>(params.dims.hidden);

  switch (params.kind) {
    case CellKind::kRnn:
    case CellKind::kMrnnf: {
      const auto& W_hh = params.at("W_hh");
      const auto& W_zh = params.at("W_zh");
      Eigen::MatrixXd P = params.at("W_hx");  // W_hh^k W_hx
      for (std::size_t k = 0; k <= lags; ++k) {
        A.push_back(W_zh * P);
        P = W_hh * P;
      }
      if (params.kind == CellKind::kRnn) break;

      const auto& W_m = params.at("W_m");
      const Eigen::MatrixXd W_mm = W_m.leftCols(q);
      const Eigen::MatrixXd W_mf = W_m.rightCols(p);
      const auto& W_zm = params.at("W_zm");
      const Eigen::MatrixXd w = filter_table(memory_values(params.at("theta_d")), params.K);
      std::vector<Eigen::MatrixXd> E;  // W_zm W_mm^s W_mf
      E.reserve(lags + 1);
      Eigen::MatrixXd R = W_mf;
      for (std::size_t s = 0; s <= lags; ++s) {
        E.push_back(W_zm * R);
        R = W_mm * R;
      }
      for (std::size_t k = 0; k <= lags; ++k) {
        // G_{k-s} is nonzero only while k - s < K.
        const std::size_t lo = k + 1 > params.K ? k + 1 - params.K : 0;
        for (std::size_t s = lo; s <= k; ++s) {
          const auto lag = static_cast<Eigen::Index>(k - s + 1);
          A[k].noalias() += E[s] * w.row(lag).transpose().asDiagonal();
        }
      }
      break;
    }
    case CellKind::kConstGatesLstm:
    case CellKind::kConstGatesMlstm: {
      const Eigen::MatrixXd D_i = diag_sigmoid(params.at("theta_i"));
      const Eigen::MatrixXd D_o = diag_sigmoid(params.at("theta_o"));
      const Eigen::MatrixXd left = params.at("W_zh") * D_o;
      const Eigen::MatrixXd right = D_i * params.at("W_cx");
      const Eigen::MatrixXd C = D_i * params.at("W_ch") * D_o;
      if (params.kind == CellKind::kConstGatesLstm) {
        const Eigen::MatrixXd M = diag_sigmoid(params.at("theta_f")) + C;
        Eigen::MatrixXd P = right;
        for (std::size_t k = 0; k <= lags; ++k) {
          A.push_back(left * P);
          P = M * P;
        }
      } else {
        const auto theta =
            theta_coefficients(C, memory_values(params.at("theta_d")), params.K, lags);
        for (const auto& t : theta) A.push_back(left * t * right);
      }
      break;
    }
    default:
      throw ConfigError("impulse_response supports rnn, mrnnf, const-gates-lstm and "
                        "const-gates-mlstm, got " + std::string(to_string(params.kind)));
  }
  return A;
}

std::vector<double> impulse_entry(const std::vector<Eigen::MatrixXd>& A, Eigen::Index i,
                                  Eigen::Index j) {
  std::vector<double> out;
  out.reserve(A.size());
  for (const auto& a : A) {
    if (i >= a.rows() || j >= a.cols()) throw ShapeError("impulse_entry: index out of range");
    out.push_back(a(i, j));
  }
  return out;
}

}  // namespace lmrnn
