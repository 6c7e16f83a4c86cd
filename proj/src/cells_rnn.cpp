// RNN and memory-augmented RNN cells (rnn, mrnn, mrnnf).

#include <string>

#include "cells_internal.hpp"

namespace lmrnn {
namespace detail {

Gradients zero_gradients(const CellParams& params) {
  Gradients g;
  for (const auto& [name, t] : params.tensors) {
    g.emplace(name, Eigen::MatrixXd::Zero(t.rows(), t.cols()));
  }
  return g;
}

Eigen::VectorXd output_backward(const CellParams& params, const StateCache& cache,
                                const Eigen::MatrixXd& output_grads, Eigen::Index t,
                                Gradients& g) {
  Eigen::VectorXd dpre = output_grads.row(t).transpose();
  if (params.output_function != Activation::kIdentity) {
    dpre = dpre.cwiseProduct(activation_grad(params.output_function, cache.z.col(t)));
  }
  g.at("W_zh").noalias() += dpre * cache.h.col(t).transpose();
  g.at("b_z") += dpre;
  return dpre;
}

namespace {

// F_i = sum_{j=1}^{K} w_j x_i^{t-j+1} with zero prehistory.
double filter_input(const Eigen::MatrixXd& X, Eigen::Index i, Eigen::Index t,
                    const std::vector<double>& w) {
  const Eigen::Index K = static_cast<Eigen::Index>(w.size()) - 1;
  double acc = 0.0;
  for (Eigen::Index j = 1; j <= K && t - j + 1 >= 0; ++j) acc += w[j] * X(i, t - j + 1);
  return acc;
}

}  // namespace

ForwardResult forward_rnn_family(const CellParams& params, const Eigen::MatrixXd& inputs) {
  const CellKind kind = params.kind;
  const bool memory = kind != CellKind::kRnn;
  const bool dynamic = kind == CellKind::kMrnn;
  const auto p = static_cast<Eigen::Index>(params.dims.input);
  const auto q = static_cast<Eigen::Index>(params.dims.hidden);
  const auto pz = static_cast<Eigen::Index>(params.dims.output);
  const Eigen::Index T = inputs.rows();
  const auto K = static_cast<std::size_t>(params.K);
  const Activation phi = params.hidden_activation;

  const auto& W_hh = params.at("W_hh");
  const auto& W_hx = params.at("W_hx");
  const auto& b_h = params.at("b_h");
  const auto& W_zh = params.at("W_zh");
  const auto& b_z = params.at("b_z");

  ForwardResult res;
  StateCache& c = res.cache;
  c.kind = kind;
  c.T = static_cast<std::size_t>(T);
  c.K = K;
  c.parameter_count = params.parameter_count();
  c.x = inputs.transpose();
  c.h.resize(q, T);
  c.pre_z.resize(pz, T);
  c.z.resize(pz, T);
  if (memory) {
    c.m.resize(q, T);
    c.F.resize(p, T);
    c.d.resize(p, T);
  }

  std::vector<std::vector<double>> w(static_cast<std::size_t>(p), std::vector<double>(K + 1));
  if (kind == CellKind::kMrnnf) {
    const auto& theta = params.at("theta_d");
    c.fixed_w.assign(static_cast<std::size_t>(p), std::vector<double>(K + 1));
    c.fixed_dw.assign(static_cast<std::size_t>(p), std::vector<double>(K + 1));
    for (Eigen::Index i = 0; i < p; ++i) {
      const double d = memory_from_theta(theta(i, 0));
      fill_frac_weights(d, c.fixed_w[i], c.fixed_dw[i]);
    }
  }

  Eigen::VectorXd h_prev = Eigen::VectorXd::Zero(q);
  Eigen::VectorXd m_prev = Eigen::VectorXd::Zero(q);
  Eigen::VectorXd d_prev = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd pre_h(q);
  Eigen::VectorXd pre_m(q);
  Eigen::VectorXd mem_in(q + p);
  Eigen::VectorXd gate_in(2 * p + 2 * q);
  Eigen::VectorXd pre_z(pz);

  for (Eigen::Index t = 0; t < T; ++t) {
    const auto x_t = c.x.col(t);
    pre_h.noalias() = W_hh * h_prev;
    pre_h.noalias() += W_hx * x_t;
    pre_h += b_h;
    c.h.col(t) = activate(phi, pre_h);
    check_finite(c.h.col(t), static_cast<std::size_t>(t), "hidden state");

    pre_z.noalias() = W_zh * c.h.col(t);
    pre_z += b_z;

    if (memory) {
      if (dynamic) {
        gate_in << d_prev, h_prev, m_prev, x_t;
        Eigen::VectorXd a_d = params.at("W_d") * gate_in + params.at("b_d");
        c.d.col(t) = 0.5 * sigmoid_vec(a_d);
        for (Eigen::Index i = 0; i < p; ++i) {
          fill_frac_weights(c.d(i, t), w[static_cast<std::size_t>(i)], {});
          c.F(i, t) = filter_input(c.x, i, t, w[static_cast<std::size_t>(i)]);
        }
      } else {
        for (Eigen::Index i = 0; i < p; ++i) {
          c.d(i, t) = memory_from_theta(params.at("theta_d")(i, 0));
          c.F(i, t) = filter_input(c.x, i, t, c.fixed_w[static_cast<std::size_t>(i)]);
        }
      }
      mem_in << m_prev, c.F.col(t);
      pre_m.noalias() = params.at("W_m") * mem_in;
      pre_m += params.at("b_m");
      c.m.col(t) = activate(phi, pre_m);
      check_finite(c.m.col(t), static_cast<std::size_t>(t), "memory state");
      pre_z.noalias() += params.at("W_zm") * c.m.col(t);
      m_prev = c.m.col(t);
      d_prev = c.d.col(t);
    }

    c.pre_z.col(t) = pre_z;
    c.z.col(t) = activate(params.output_function, pre_z);
    check_finite(c.z.col(t), static_cast<std::size_t>(t), "output");
    h_prev = c.h.col(t);
  }
  res.outputs = c.z.transpose();
  return res;
}

Gradients backward_rnn_family(const CellParams& params, const StateCache& cache,
                              const Eigen::MatrixXd& output_grads) {
  const CellKind kind = params.kind;
  const bool memory = kind != CellKind::kRnn;
  const bool dynamic = kind == CellKind::kMrnn;
  const auto p = static_cast<Eigen::Index>(params.dims.input);
  const auto q = static_cast<Eigen::Index>(params.dims.hidden);
  const Eigen::Index Tb = output_grads.rows();
  const auto K = static_cast<Eigen::Index>(params.K);
  const Activation phi = params.hidden_activation;

  Gradients g = zero_gradients(params);
  const auto& W_hh = params.at("W_hh");
  auto& gW_hh = g.at("W_hh");
  auto& gW_hx = g.at("W_hx");
  auto& gb_h = g.at("b_h");

  Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(q);
  Eigen::VectorXd dm_next = Eigen::VectorXd::Zero(q);
  Eigen::VectorXd dd_next = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd zero_q = Eigen::VectorXd::Zero(q);
  Eigen::VectorXd zero_p = Eigen::VectorXd::Zero(p);
  std::vector<double> w(static_cast<std::size_t>(K + 1));
  std::vector<double> dw(static_cast<std::size_t>(K + 1));
  Eigen::VectorXd gate_in(2 * p + 2 * q);
  Eigen::VectorXd mem_in(q + p);

  for (Eigen::Index t = Tb - 1; t >= 0; --t) {
    const Eigen::VectorXd dpre_z = output_backward(params, cache, output_grads, t, g);
    const auto h_prev = t > 0 ? Eigen::VectorXd(cache.h.col(t - 1)) : zero_q;

    Eigen::VectorXd dh = params.at("W_zh").transpose() * dpre_z + dh_next;
    Eigen::VectorXd dh_prev = Eigen::VectorXd::Zero(q);
    Eigen::VectorXd dm_prev = Eigen::VectorXd::Zero(q);
    Eigen::VectorXd dd_prev = Eigen::VectorXd::Zero(p);

    if (memory) {
      const auto m_prev = t > 0 ? Eigen::VectorXd(cache.m.col(t - 1)) : zero_q;
      g.at("W_zm").noalias() += dpre_z * cache.m.col(t).transpose();
      Eigen::VectorXd dm = params.at("W_zm").transpose() * dpre_z + dm_next;
      const Eigen::VectorXd da_m = dm.cwiseProduct(activation_grad(phi, cache.m.col(t)));
      mem_in << m_prev, cache.F.col(t);
      g.at("W_m").noalias() += da_m * mem_in.transpose();
      g.at("b_m") += da_m;
      const Eigen::VectorXd back = params.at("W_m").transpose() * da_m;
      dm_prev += back.head(q);
      const Eigen::VectorXd dF = back.tail(p);

      // Gradient of the filter output with respect to each d_i.
      Eigen::VectorXd dd = dd_next;
      for (Eigen::Index i = 0; i < p; ++i) {
        const std::vector<double>* dwp = nullptr;
        if (dynamic) {
          fill_frac_weights(cache.d(i, t), w, dw);
          dwp = &dw;
        } else {
          dwp = &cache.fixed_dw[static_cast<std::size_t>(i)];
        }
        double acc = 0.0;
        for (Eigen::Index j = 1; j <= K && t - j + 1 >= 0; ++j) {
          acc += (*dwp)[static_cast<std::size_t>(j)] * cache.x(i, t - j + 1);
        }
        dd[i] += dF[i] * acc;
      }

      const Eigen::VectorXd dlogit =
          dd.cwiseProduct(cache.d.col(t).unaryExpr([](double v) { return v * (1.0 - 2.0 * v); }));
      if (dynamic) {
        const auto d_prev = t > 0 ? Eigen::VectorXd(cache.d.col(t - 1)) : zero_p;
        gate_in << d_prev, h_prev, m_prev, cache.x.col(t);
        g.at("W_d").noalias() += dlogit * gate_in.transpose();
        g.at("b_d") += dlogit;
        const Eigen::VectorXd back_d = params.at("W_d").transpose() * dlogit;
        dd_prev += back_d.segment(0, p);
        dh_prev += back_d.segment(p, q);
        dm_prev += back_d.segment(p + q, q);
      } else {
        g.at("theta_d") += dlogit;
      }
    }

    const Eigen::VectorXd da_h = dh.cwiseProduct(activation_grad(phi, cache.h.col(t)));
    gW_hh.noalias() += da_h * h_prev.transpose();
    gW_hx.noalias() += da_h * cache.x.col(t).transpose();
    gb_h += da_h;
    dh_prev.noalias() += W_hh.transpose() * da_h;

    dh_next = dh_prev;
    dm_next = dm_prev;
    dd_next = dd_prev;
  }
  return g;
}

}  // namespace detail

ForwardResult forward(const CellParams& params, const Eigen::MatrixXd& inputs) {
  params.validate();
  detail::check_elementwise(params.hidden_activation);
  detail::check_elementwise(params.output_function);
  if (inputs.rows() < 1) throw ShapeError("forward: need at least one timestep");
  if (static_cast<std::size_t>(inputs.cols()) != params.dims.input) {
    throw ShapeError("forward: inputs have " + std::to_string(inputs.cols()) +
                     " columns, cell expects " + std::to_string(params.dims.input));
  }
  if (!inputs.allFinite()) throw DomainError("forward: inputs contain non-finite values");
  switch (params.kind) {
    case CellKind::kRnn:
    case CellKind::kMrnn:
    case CellKind::kMrnnf:
      return detail::forward_rnn_family(params, inputs);
    default:
      return detail::forward_lstm_family(params, inputs);
  }
}

Gradients backward(const CellParams& params, const StateCache& cache,
                   const Eigen::MatrixXd& output_grads) {
  if (cache.kind != params.kind || cache.K != params.K ||
      cache.parameter_count != params.parameter_count() ||
      static_cast<std::size_t>(cache.h.rows()) != params.dims.hidden ||
      static_cast<std::size_t>(cache.x.rows()) != params.dims.input) {
    throw ContractError("backward: cache was not produced by these parameters");
  }
  if (static_cast<std::size_t>(output_grads.rows()) > cache.T ||
      static_cast<std::size_t>(output_grads.cols()) != params.dims.output) {
    throw ContractError("backward: output gradient shape does not match the cache");
  }
  switch (params.kind) {
    case CellKind::kRnn:
    case CellKind::kMrnn:
    case CellKind::kMrnnf:
      return detail::backward_rnn_family(params, cache, output_grads);
    default:
      return detail::backward_lstm_family(params, cache, output_grads);
  }
}

}  // namespace lmrnn
