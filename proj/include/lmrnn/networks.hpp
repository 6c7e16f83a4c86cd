#pragma once

// Recurrent cells with forward pass, state caching and exact
// backpropagation through time.
//
// Every cell maps an input sequence x^1..x^T (rows of a T x p_x matrix) to
// outputs z^1..z^T through hidden recursions started from zero state:
//
//   rnn     h = phi(W_hh h' + W_hx x + b_h)
//   lstm    f,i,o = sigmoid(W_*h h' + W_*y x + b_*), c~ = phi(W_ch h' + W_cy x + b_c)
//           c = i*c~ + f*c', h = o*phi(c)
//   mrnn    rnn hidden state plus a memory unit
//           d = sigmoid(W_d [d', h', m', x] + b_d) / 2
//           F_i = sum_{j=1}^{K} w_j(d_i) x_i^{t-j+1}
//           m = phi(W_m [m', F] + b_m)
//   mlstm   lstm without forget gate; the cell state solves the truncated
//           fractional difference equation
//           c_i = -sum_{j=1}^{K} w_j(d_i) c_i^{t-j} + i_i c~_i,
//           d = sigmoid(W_d [d', h', x] + b_d) / 2, one d per cell coordinate
//   *f      fixed memory: d = sigmoid(theta_d) / 2, constant in time
//   const-gates-*  gates are trainable constants sigmoid(theta_*)
//
// and z = g(W_zh h [+ W_zm m] + b_z). phi is tanh by default (identity gives
// the linearised networks); g is identity by default.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "lmrnn/fracdiff.hpp"
#include "lmrnn/types.hpp"

namespace lmrnn {

enum class CellKind {
  kRnn,
  kLstm,
  kMrnn,
  kMrnnf,
  kMlstm,
  kMlstmf,
  kConstGatesLstm,
  kConstGatesMlstm,
};

inline constexpr CellKind kAllCellKinds[] = {
    CellKind::kRnn,   CellKind::kLstm,   CellKind::kMrnn,           CellKind::kMrnnf,
    CellKind::kMlstm, CellKind::kMlstmf, CellKind::kConstGatesLstm, CellKind::kConstGatesMlstm,
};

[[nodiscard]] std::string_view to_string(CellKind k);
[[nodiscard]] CellKind parse_cell_kind(std::string_view name);
[[nodiscard]] bool has_memory_filter(CellKind k);
[[nodiscard]] bool has_dynamic_memory(CellKind k);

struct Dims {
  std::size_t input = 1;   // p_x
  std::size_t hidden = 8;  // q
  std::size_t output = 1;  // p_z
};

/// Named tensors in a fixed order. Vectors are stored as n x 1 matrices.
using ParamMap = std::map<std::string, Eigen::MatrixXd, std::less<>>;
/// Gradients carry exactly the names and shapes of the parameters.
using Gradients = ParamMap;

struct TensorSpec {
  std::string name;
  Eigen::Index rows;
  Eigen::Index cols;
  bool bias;  // zero-initialised
};

/// Field list for a cell kind; names follow the model equations.
[[nodiscard]] std::vector<TensorSpec> param_layout(CellKind kind, const Dims& dims);

struct CellParams {
  CellKind kind = CellKind::kRnn;
  Dims dims;
  std::size_t K = kDefaultFilterLag;
  Activation hidden_activation = Activation::kTanh;
  Activation output_function = Activation::kIdentity;
  ParamMap tensors;

  [[nodiscard]] const Eigen::MatrixXd& at(std::string_view name) const;
  [[nodiscard]] Eigen::MatrixXd& at(std::string_view name);
  /// Throws ShapeError when tensors do not match param_layout.
  void validate() const;
  [[nodiscard]] std::size_t parameter_count() const;
};

enum class InitScheme { kUniformFanIn, kZero };

/// Weights uniform(-1/sqrt(q), 1/sqrt(q)), biases and theta parameters zero
/// (so fixed memory starts at d = 0.25 and constant gates at 0.5).
[[nodiscard]] CellParams init_params(CellKind kind, const Dims& dims, std::size_t K,
                                     std::uint64_t seed,
                                     InitScheme scheme = InitScheme::kUniformFanIn);

/// Per-timestep state kept for backpropagation. Column t holds step t.
struct StateCache {
  CellKind kind = CellKind::kRnn;
  std::size_t T = 0;
  std::size_t K = 0;
  Eigen::MatrixXd x;       // p_x x T
  Eigen::MatrixXd h;       // q x T
  Eigen::MatrixXd m;       // q x T     (mrnn family)
  Eigen::MatrixXd F;       // p_x x T   (mrnn family)
  Eigen::MatrixXd d;       // memory parameter per step (mrnn: p_x, mlstm: q)
  Eigen::MatrixXd c;       // q x T     (lstm family)
  Eigen::MatrixXd ctilde;  // q x T
  Eigen::MatrixXd gate_f;  // q x T
  Eigen::MatrixXd gate_i;  // q x T
  Eigen::MatrixXd gate_o;  // q x T
  Eigen::MatrixXd pre_z;   // p_z x T
  Eigen::MatrixXd z;       // p_z x T
  // Fixed-memory kinds compute their filter weights once per pass.
  std::vector<std::vector<double>> fixed_w;
  std::vector<std::vector<double>> fixed_dw;
  std::size_t parameter_count = 0;
};

struct ForwardResult {
  Eigen::MatrixXd outputs;  // T x p_z
  StateCache cache;
};

/// Runs the cell over `inputs` (T x p_x). Throws DivergenceError naming the
/// first timestep with a non-finite state.
[[nodiscard]] ForwardResult forward(const CellParams& params, const Eigen::MatrixXd& inputs);

/// Exact gradients of L = sum_t <output_grads_t, z_t> with respect to every
/// parameter. output_grads may have fewer rows than the cache, in which case
/// only the first output_grads.rows() steps are backpropagated (the cells are
/// causal, so this equals a forward/backward over the shorter prefix).
[[nodiscard]] Gradients backward(const CellParams& params, const StateCache& cache,
                                 const Eigen::MatrixXd& output_grads);

struct LossResult {
  double loss = 0.0;
  Eigen::MatrixXd grad;
};

/// Mean over rows of the squared l2 error and its gradient 2 (pred - target) / T.
[[nodiscard]] LossResult loss_mse(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target);

/// Versioned JSON document (see schemas/cell_params.schema.json).
[[nodiscard]] std::string params_to_json(const CellParams& params);
[[nodiscard]] CellParams params_from_json(std::string_view json);

/// d = 0.5 sigmoid(theta), the reparameterisation used by fixed-memory kinds.
inline double memory_from_theta(double theta) { return 0.5 * sigmoid(theta); }

/// c = -sum_{j=1}^{K} w_j c^{t-j} + drive. `history` is most-recent-first
/// (history[0] = c^{t-1}); `w` holds w_0..w_K. Shared by the MLSTM cells.
[[nodiscard]] double memory_cell_update(std::span<const double> history,
                                        std::span<const double> w, double drive);

}  // namespace lmrnn
