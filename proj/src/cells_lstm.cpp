// LSTM-type cells: lstm, mlstm, mlstmf and the constant-gates variants.

#include <string>

#include "cells_internal.hpp"

namespace lmrnn::detail {
namespace {

struct Layout {
  bool forget_gate;    // lstm, const-gates-lstm
  bool memory_filter;  // mlstm family
  bool dynamic_d;      // mlstm
  bool const_gates;    // const-gates-*
  const char* in;      // suffix of input weights: "y" for lstm, "x" otherwise
};

Layout layout_of(CellKind k) {
  switch (k) {
    case CellKind::kLstm: return {true, false, false, false, "y"};
    case CellKind::kMlstm: return {false, true, true, false, "x"};
    case CellKind::kMlstmf: return {false, true, false, false, "x"};
    case CellKind::kConstGatesLstm: return {true, false, false, true, "x"};
    case CellKind::kConstGatesMlstm: return {false, true, false, true, "x"};
    default: break;
  }
  throw ContractError("not an LSTM-type cell");
}

std::string wname(char gate, char src) { return std::string("W_") + gate + src; }

Eigen::VectorXd gate_pre(const CellParams& p, char gate, const char* in,
                         const Eigen::VectorXd& h_prev, const Eigen::VectorXd& x) {
  Eigen::VectorXd a = p.at(std::string("b_") + gate);
  a.noalias() += p.at(wname(gate, 'h')) * h_prev;
  a.noalias() += p.at(wname(gate, in[0])) * x;
  return a;
}

}  // namespace

ForwardResult forward_lstm_family(const CellParams& params, const Eigen::MatrixXd& inputs) {
  const Layout L = layout_of(params.kind);
  const auto p = static_cast<Eigen::Index>(params.dims.input);
  const auto q = static_cast<Eigen::Index>(params.dims.hidden);
  const auto pz = static_cast<Eigen::Index>(params.dims.output);
  const Eigen::Index T = inputs.rows();
  const auto K = static_cast<std::size_t>(params.K);
  const Activation phi = params.hidden_activation;

  ForwardResult res;
  StateCache& c = res.cache;
  c.kind = params.kind;
  c.T = static_cast<std::size_t>(T);
  c.K = K;
  c.parameter_count = params.parameter_count();
  c.x = inputs.transpose();
  c.h.resize(q, T);
  c.c.resize(q, T);
  c.ctilde.resize(q, T);
  c.gate_i.resize(q, T);
  c.gate_o.resize(q, T);
  if (L.forget_gate) c.gate_f.resize(q, T);
  if (L.memory_filter) c.d.resize(q, T);
  c.pre_z.resize(pz, T);
  c.z.resize(pz, T);

  Eigen::VectorXd const_f;
  Eigen::VectorXd const_i;
  Eigen::VectorXd const_o;
  if (L.const_gates) {
    const_i = sigmoid_vec(params.at("theta_i"));
    const_o = sigmoid_vec(params.at("theta_o"));
    if (L.forget_gate) const_f = sigmoid_vec(params.at("theta_f"));
  }
  if (L.memory_filter && !L.dynamic_d) {
    const auto& theta = params.at("theta_d");
    c.fixed_w.assign(static_cast<std::size_t>(q), std::vector<double>(K + 1));
    c.fixed_dw.assign(static_cast<std::size_t>(q), std::vector<double>(K + 1));
    for (Eigen::Index i = 0; i < q; ++i) {
      fill_frac_weights(memory_from_theta(theta(i, 0)), c.fixed_w[i], c.fixed_dw[i]);
    }
  }

  Eigen::VectorXd h_prev = Eigen::VectorXd::Zero(q);
  Eigen::VectorXd c_prev = Eigen::VectorXd::Zero(q);
  Eigen::VectorXd d_prev = Eigen::VectorXd::Zero(q);
  Eigen::VectorXd gate_in(2 * q + p);
  std::vector<double> w(K + 1);
  std::vector<double> history(K);
  const auto& W_zh = params.at("W_zh");
  const auto& b_z = params.at("b_z");

  for (Eigen::Index t = 0; t < T; ++t) {
    const Eigen::VectorXd x_t = c.x.col(t);
    if (L.const_gates) {
      c.gate_i.col(t) = const_i;
      c.gate_o.col(t) = const_o;
      if (L.forget_gate) c.gate_f.col(t) = const_f;
    } else {
      c.gate_i.col(t) = sigmoid_vec(gate_pre(params, 'i', L.in, h_prev, x_t));
      c.gate_o.col(t) = sigmoid_vec(gate_pre(params, 'o', L.in, h_prev, x_t));
      if (L.forget_gate) c.gate_f.col(t) = sigmoid_vec(gate_pre(params, 'f', L.in, h_prev, x_t));
    }
    c.ctilde.col(t) = activate(phi, gate_pre(params, 'c', L.in, h_prev, x_t));

    if (L.forget_gate) {
      c.c.col(t) = c.gate_i.col(t).cwiseProduct(c.ctilde.col(t)) +
                   c.gate_f.col(t).cwiseProduct(c_prev);
    } else {
      if (L.dynamic_d) {
        gate_in << d_prev, h_prev, x_t;
        c.d.col(t) = 0.5 * sigmoid_vec(params.at("W_d") * gate_in + params.at("b_d"));
      } else {
        for (Eigen::Index i = 0; i < q; ++i) {
          c.d(i, t) = memory_from_theta(params.at("theta_d")(i, 0));
        }
      }
      const std::size_t avail = std::min<std::size_t>(K, static_cast<std::size_t>(t));
      for (Eigen::Index i = 0; i < q; ++i) {
        const std::vector<double>* wp = &w;
        if (L.dynamic_d) {
          fill_frac_weights(c.d(i, t), w, {});
        } else {
          wp = &c.fixed_w[static_cast<std::size_t>(i)];
        }
        for (std::size_t j = 1; j <= avail; ++j) history[j - 1] = c.c(i, t - static_cast<Eigen::Index>(j));
        c.c(i, t) = memory_cell_update(std::span<const double>(history.data(), avail), *wp,
                                       c.gate_i(i, t) * c.ctilde(i, t));
      }
      d_prev = c.d.col(t);
    }
    check_finite(c.c.col(t), static_cast<std::size_t>(t), "cell state");
    c.h.col(t) = c.gate_o.col(t).cwiseProduct(activate(phi, c.c.col(t)));

    Eigen::VectorXd pre_z = b_z;
    pre_z.noalias() += W_zh * c.h.col(t);
    c.pre_z.col(t) = pre_z;
    c.z.col(t) = activate(params.output_function, pre_z);
    check_finite(c.z.col(t), static_cast<std::size_t>(t), "output");
    h_prev = c.h.col(t);
    c_prev = c.c.col(t);
  }
  res.outputs = c.z.transpose();
  return res;
}

Gradients backward_lstm_family(const CellParams& params, const StateCache& cache,
                               const Eigen::MatrixXd& output_grads) {
  const Layout L = layout_of(params.kind);
  const auto p = static_cast<Eigen::Index>(params.dims.input);
  const auto q = static_cast<Eigen::Index>(params.dims.hidden);
  const Eigen::Index Tb = output_grads.rows();
  const auto K = static_cast<Eigen::Index>(params.K);
  const Activation phi = params.hidden_activation;

  Gradients g = zero_gradients(params);
  const Eigen::VectorXd zero_q = Eigen::VectorXd::Zero(q);
  Eigen::VectorXd dh_next = zero_q;
  Eigen::VectorXd dc_carry = zero_q;  // forget-gate path
  Eigen::VectorXd dd_next = zero_q;
  Eigen::MatrixXd dc_buf;             // fractional path, column t collects dL/dc_t
  if (L.memory_filter) dc_buf = Eigen::MatrixXd::Zero(q, Tb);
  std::vector<double> w(static_cast<std::size_t>(K + 1));
  std::vector<double> dw(static_cast<std::size_t>(K + 1));
  Eigen::VectorXd gate_in(2 * q + p);

  auto accumulate_gate = [&](char gate, const Eigen::VectorXd& da, const Eigen::VectorXd& h_prev,
                             const Eigen::VectorXd& x, Eigen::VectorXd& dh_prev) {
    g.at(wname(gate, 'h')).noalias() += da * h_prev.transpose();
    g.at(wname(gate, L.in[0])).noalias() += da * x.transpose();
    g.at(std::string("b_") + gate) += da;
    dh_prev.noalias() += params.at(wname(gate, 'h')).transpose() * da;
  };

  for (Eigen::Index t = Tb - 1; t >= 0; --t) {
    const Eigen::VectorXd dpre_z = output_backward(params, cache, output_grads, t, g);
    const Eigen::VectorXd h_prev = t > 0 ? Eigen::VectorXd(cache.h.col(t - 1)) : zero_q;
    const Eigen::VectorXd c_prev = t > 0 ? Eigen::VectorXd(cache.c.col(t - 1)) : zero_q;
    const Eigen::VectorXd x_t = cache.x.col(t);
    const Eigen::VectorXd gi = cache.gate_i.col(t);
    const Eigen::VectorXd go = cache.gate_o.col(t);
    const Eigen::VectorXd ct = cache.ctilde.col(t);

    const Eigen::VectorXd dh = params.at("W_zh").transpose() * dpre_z + dh_next;
    const Eigen::VectorXd phi_c = activate(phi, cache.c.col(t));
    const Eigen::VectorXd d_o = dh.cwiseProduct(phi_c);
    Eigen::VectorXd dc = dh.cwiseProduct(go).cwiseProduct(activation_grad(phi, phi_c));
    dc += L.memory_filter ? Eigen::VectorXd(dc_buf.col(t)) : dc_carry;

    const Eigen::VectorXd d_i = dc.cwiseProduct(ct);
    const Eigen::VectorXd d_ct = dc.cwiseProduct(gi);
    Eigen::VectorXd dh_prev = zero_q;

    const Eigen::VectorXd da_i = d_i.cwiseProduct(gi.cwiseProduct((1.0 - gi.array()).matrix()));
    const Eigen::VectorXd da_o = d_o.cwiseProduct(go.cwiseProduct((1.0 - go.array()).matrix()));
    const Eigen::VectorXd da_c = d_ct.cwiseProduct(activation_grad(phi, ct));

    Eigen::VectorXd da_f;
    if (L.forget_gate) {
      const Eigen::VectorXd gf = cache.gate_f.col(t);
      const Eigen::VectorXd d_f = dc.cwiseProduct(c_prev);
      da_f = d_f.cwiseProduct(gf.cwiseProduct((1.0 - gf.array()).matrix()));
      dc_carry = dc.cwiseProduct(gf);
    }

    if (L.const_gates) {
      g.at("theta_i") += da_i;
      g.at("theta_o") += da_o;
      if (L.forget_gate) g.at("theta_f") += da_f;
    } else {
      accumulate_gate('i', da_i, h_prev, x_t, dh_prev);
      accumulate_gate('o', da_o, h_prev, x_t, dh_prev);
      if (L.forget_gate) accumulate_gate('f', da_f, h_prev, x_t, dh_prev);
    }
    accumulate_gate('c', da_c, h_prev, x_t, dh_prev);

    if (L.memory_filter) {
      Eigen::VectorXd dd = dd_next;
      for (Eigen::Index i = 0; i < q; ++i) {
        const std::vector<double>* wp = &w;
        const std::vector<double>* dwp = &dw;
        if (L.dynamic_d) {
          fill_frac_weights(cache.d(i, t), w, dw);
        } else {
          wp = &cache.fixed_w[static_cast<std::size_t>(i)];
          dwp = &cache.fixed_dw[static_cast<std::size_t>(i)];
        }
        double acc = 0.0;
        for (Eigen::Index j = 1; j <= K && t - j >= 0; ++j) {
          dc_buf(i, t - j) -= (*wp)[static_cast<std::size_t>(j)] * dc[i];
          acc += (*dwp)[static_cast<std::size_t>(j)] * cache.c(i, t - j);
        }
        dd[i] -= dc[i] * acc;
      }
      const Eigen::VectorXd dlogit =
          dd.cwiseProduct(cache.d.col(t).unaryExpr([](double v) { return v * (1.0 - 2.0 * v); }));
      if (L.dynamic_d) {
        const Eigen::VectorXd d_prev = t > 0 ? Eigen::VectorXd(cache.d.col(t - 1)) : zero_q;
        gate_in << d_prev, h_prev, x_t;
        g.at("W_d").noalias() += dlogit * gate_in.transpose();
        g.at("b_d") += dlogit;
        const Eigen::VectorXd back = params.at("W_d").transpose() * dlogit;
        dd_next = back.segment(0, q);
        dh_prev += back.segment(q, q);
      } else {
        g.at("theta_d") += dlogit;
      }
    }
    dh_next = dh_prev;
  }
  return g;
}

}  // namespace lmrnn::detail
