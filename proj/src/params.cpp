#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "json.hpp"

#include "lmrnn/errors.hpp"
#include "lmrnn/networks.hpp"
#include "lmrnn/rng.hpp"

namespace lmrnn {

std::string_view to_string(CellKind k) {
  switch (k) {
    case CellKind::kRnn: return "rnn";
    case CellKind::kLstm: return "lstm";
    case CellKind::kMrnn: return "mrnn";
    case CellKind::kMrnnf: return "mrnnf";
    case CellKind::kMlstm: return "mlstm";
    case CellKind::kMlstmf: return "mlstmf";
    case CellKind::kConstGatesLstm: return "const-gates-lstm";
    case CellKind::kConstGatesMlstm: return "const-gates-mlstm";
  }
  return "rnn";
}

CellKind parse_cell_kind(std::string_view name) {
  for (CellKind k : kAllCellKinds) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown cell kind '" + std::string(name) + "'");
}

bool has_memory_filter(CellKind k) {
  return k == CellKind::kMrnn || k == CellKind::kMrnnf || k == CellKind::kMlstm ||
         k == CellKind::kMlstmf || k == CellKind::kConstGatesMlstm;
}

bool has_dynamic_memory(CellKind k) { return k == CellKind::kMrnn || k == CellKind::kMlstm; }

std::vector<TensorSpec> param_layout(CellKind kind, const Dims& dims) {
  const auto p = static_cast<Eigen::Index>(dims.input);
  const auto q = static_cast<Eigen::Index>(dims.hidden);
  const auto pz = static_cast<Eigen::Index>(dims.output);
  std::vector<TensorSpec> out;
  auto weight = [&](std::string n, Eigen::Index r, Eigen::Index c) {
    out.push_back({std::move(n), r, c, false});
  };
  auto bias = [&](std::string n, Eigen::Index r) { out.push_back({std::move(n), r, 1, true}); };

  switch (kind) {
    case CellKind::kRnn:
    case CellKind::kMrnn:
    case CellKind::kMrnnf:
      weight("W_hh", q, q);
      weight("W_hx", q, p);
      bias("b_h", q);
      if (kind != CellKind::kRnn) {
        weight("W_m", q, q + p);
        bias("b_m", q);
        weight("W_zm", pz, q);
      }
      if (kind == CellKind::kMrnn) {
        weight("W_d", p, p + q + q + p);
        bias("b_d", p);
      }
      if (kind == CellKind::kMrnnf) bias("theta_d", p);
      break;
    case CellKind::kLstm:
      for (const char* g : {"f", "i", "o", "c"}) {
        weight(std::string("W_") + g + "h", q, q);
        weight(std::string("W_") + g + "y", q, p);
        bias(std::string("b_") + g, q);
      }
      break;
    case CellKind::kMlstm:
    case CellKind::kMlstmf:
      if (kind == CellKind::kMlstm) {
        weight("W_d", q, q + q + p);
        bias("b_d", q);
      } else {
        bias("theta_d", q);
      }
      for (const char* g : {"i", "o", "c"}) {
        weight(std::string("W_") + g + "h", q, q);
        weight(std::string("W_") + g + "x", q, p);
        bias(std::string("b_") + g, q);
      }
      break;
    case CellKind::kConstGatesLstm:
    case CellKind::kConstGatesMlstm:
      if (kind == CellKind::kConstGatesLstm) {
        bias("theta_f", q);
      } else {
        bias("theta_d", q);
      }
      bias("theta_i", q);
      bias("theta_o", q);
      weight("W_ch", q, q);
      weight("W_cx", q, p);
      bias("b_c", q);
      break;
  }
  weight("W_zh", pz, q);
  bias("b_z", pz);
  return out;
}

const Eigen::MatrixXd& CellParams::at(std::string_view name) const {
  auto it = tensors.find(name);
  if (it == tensors.end()) {
    throw ShapeError("cell parameters of kind " + std::string(to_string(kind)) +
                     " have no tensor '" + std::string(name) + "'");
  }
  return it->second;
}

Eigen::MatrixXd& CellParams::at(std::string_view name) {
  return const_cast<Eigen::MatrixXd&>(std::as_const(*this).at(name));
}

void CellParams::validate() const {
  if (dims.input == 0 || dims.hidden == 0 || dims.output == 0) {
    throw ShapeError("cell dimensions must be positive");
  }
  if (has_memory_filter(kind) && K == 0) throw ShapeError("memory cells need K >= 1");
  const auto layout = param_layout(kind, dims);
  if (layout.size() != tensors.size()) {
    throw ShapeError("kind " + std::string(to_string(kind)) + " expects " +
                     std::to_string(layout.size()) + " tensors, found " +
                     std::to_string(tensors.size()));
  }
  for (const auto& spec : layout) {
    const auto& t = at(spec.name);
    if (t.rows() != spec.rows || t.cols() != spec.cols) {
      throw ShapeError("tensor " + spec.name + " is " + std::to_string(t.rows()) + "x" +
                       std::to_string(t.cols()) + ", expected " + std::to_string(spec.rows) +
                       "x" + std::to_string(spec.cols));
    }
  }
}

std::size_t CellParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [name, t] : tensors) n += static_cast<std::size_t>(t.size());
  return n;
}

CellParams init_params(CellKind kind, const Dims& dims, std::size_t K, std::uint64_t seed,
                       InitScheme scheme) {
  CellParams p;
  p.kind = kind;
  p.dims = dims;
  p.K = K;
  if (dims.input == 0 || dims.hidden == 0 || dims.output == 0) {
    throw ShapeError("init_params: dimensions must be positive");
  }
  if (has_memory_filter(kind) && K == 0) throw ShapeError("init_params: memory cells need K >= 1");
  Rng rng(seed, Stream::kInit);
  const double bound = 1.0 / std::sqrt(static_cast<double>(dims.hidden));
  for (const auto& spec : param_layout(kind, dims)) {
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(spec.rows, spec.cols);
    if (!spec.bias && scheme == InitScheme::kUniformFanIn) {
      // Column-major fill order is part of the determinism contract.
      for (Eigen::Index c = 0; c < t.cols(); ++c) {
        for (Eigen::Index r = 0; r < t.rows(); ++r) t(r, c) = rng.uniform(-bound, bound);
      }
    }
    p.tensors.emplace(spec.name, std::move(t));
  }
  return p;
}

LossResult loss_mse(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
    throw ShapeError("loss_mse: prediction and target shapes differ");
  }
  if (pred.rows() == 0) throw ShapeError("loss_mse: empty input");
  const double T = static_cast<double>(pred.rows());
  const Eigen::MatrixXd diff = pred - target;
  return {diff.squaredNorm() / T, (2.0 / T) * diff};
}

double memory_cell_update(std::span<const double> history, std::span<const double> w,
                          double drive) {
  double acc = 0.0;
  const std::size_t n = std::min(history.size(), w.empty() ? 0 : w.size() - 1);
  for (std::size_t j = 1; j <= n; ++j) acc += w[j] * history[j - 1];
  return drive - acc;
}

// ---------------------------------------------------------------------------
// JSON

namespace {
constexpr int kParamsVersion = 1;
constexpr const char* kParamsFormat = "lmrnn.cell_params";
}  // namespace

std::string params_to_json(const CellParams& params) {
  params.validate();
  nlohmann::ordered_json j;
  j["format"] = kParamsFormat;
  j["version"] = kParamsVersion;
  j["kind"] = std::string(to_string(params.kind));
  j["dims"] = {{"input", params.dims.input},
               {"hidden", params.dims.hidden},
               {"output", params.dims.output}};
  j["K"] = params.K;
  j["hidden_activation"] = std::string(to_string(params.hidden_activation));
  j["output_function"] = std::string(to_string(params.output_function));
  nlohmann::ordered_json tensors = nlohmann::ordered_json::object();
  for (const auto& spec : param_layout(params.kind, params.dims)) {
    const auto& t = params.at(spec.name);
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(t.size()));
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      for (Eigen::Index c = 0; c < t.cols(); ++c) data.push_back(t(r, c));
    }
    tensors[spec.name] = {{"rows", t.rows()}, {"cols", t.cols()}, {"data", data}};
  }
  j["tensors"] = std::move(tensors);
  return j.dump(2);
}

CellParams params_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("cell parameter JSON: ") + e.what());
  }
  try {
    if (j.value("format", std::string()) != kParamsFormat) {
      throw ConfigError("cell parameter JSON: missing or wrong 'format' field");
    }
    if (j.at("version").get<int>() != kParamsVersion) {
      throw ConfigError("cell parameter JSON: unsupported version");
    }
    CellParams p;
    p.kind = parse_cell_kind(j.at("kind").get<std::string>());
    const auto& dims = j.at("dims");
    p.dims = {dims.at("input").get<std::size_t>(), dims.at("hidden").get<std::size_t>(),
              dims.at("output").get<std::size_t>()};
    p.K = j.value("K", kDefaultFilterLag);
    p.hidden_activation = parse_activation(j.value("hidden_activation", std::string("tanh")));
    p.output_function = parse_activation(j.value("output_function", std::string("identity")));
    for (const auto& [name, tj] : j.at("tensors").items()) {
      const auto rows = tj.at("rows").get<Eigen::Index>();
      const auto cols = tj.at("cols").get<Eigen::Index>();
      const auto data = tj.at("data").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
        throw ShapeError("tensor " + name + ": data length does not match rows*cols");
      }
      Eigen::MatrixXd t(rows, cols);
      for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) t(r, c) = data[static_cast<std::size_t>(r * cols + c)];
      }
      p.tensors.emplace(name, std::move(t));
    }
    p.validate();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("cell parameter JSON: ") + e.what());
  }
}

}  // namespace lmrnn
