#include "lmrnn/ergodicity.hpp"

#include <cmath>
#include <string>

#include "json.hpp"
#include "lmrnn/diagnostics.hpp"
#include "lmrnn/errors.hpp"

namespace lmrnn {
namespace {

void check_contraction(double a) {
  if (!(a > 0.0 && a < 1.0)) {
    throw DomainError("contraction constant a must lie in (0, 1), got " + std::to_string(a));
  }
}

Inequality leq(std::string name, double lhs, double bound) {
  return {std::move(name), lhs, bound, lhs <= bound};
}

void conclude(Verdict& v) {
  bool all = true;
  for (const auto& c : v.checks) all = all && c.satisfied;
  v.conclusion = all ? Conclusion::kShortMemoryProven : Conclusion::kInconclusive;
}

}  // namespace

std::string_view to_string(Conclusion c) {
  switch (c) {
    case Conclusion::kShortMemoryProven: return "short-memory-proven";
    case Conclusion::kInconclusive: return "inconclusive";
    case Conclusion::kNotGeometricallyErgodic: return "not-geometrically-ergodic";
  }
  return "inconclusive";
}

Verdict check_rnn_ergodicity(const CellParams& params, double a) {
  return check_rnn_ergodicity(params, params.output_function, params.hidden_activation, a);
}

Verdict check_rnn_ergodicity(const CellParams& params, Activation output_fn,
                             Activation activation_fn, double a) {
  check_contraction(a);
  if (params.kind != CellKind::kRnn) {
    throw ConfigError("check_rnn_ergodicity needs rnn parameters, got " +
                      std::string(to_string(params.kind)));
  }
  params.validate();
  Verdict v;
  v.premises.push_back("innovations have a positive continuous density and finite second moment");
  if (is_bounded(activation_fn)) {
    v.rule = "bounded-activation";
    v.premises.push_back("activation " + std::string(to_string(activation_fn)) +
                         " is continuous and bounded");
    conclude(v);
    return v;
  }
  if (params.dims.input != 1 || params.dims.hidden != 1 || params.dims.output != 1) {
    throw ConfigError("scalar weight conditions for identity/ReLU activation need p = q = 1");
  }
  const double w_hh = params.at("W_hh")(0, 0);
  const double w_hy = params.at("W_hx")(0, 0);
  const double w_zh = params.at("W_zh")(0, 0);
  const bool bounded_output = is_bounded(output_fn);
  v.rule = bounded_output ? "scalar-rnn-bounded-output" : "scalar-rnn-linear-output";
  v.premises.push_back("l1 norm in the drift condition");
  if (!bounded_output) {
    v.checks.push_back(leq("|w_zh*w_hh| <= a", std::abs(w_zh * w_hh), a));
    v.checks.push_back(leq("|w_zh*w_hy| <= a", std::abs(w_zh * w_hy), a));
  }
  v.checks.push_back(leq("|w_hh| <= a", std::abs(w_hh), a));
  v.checks.push_back(leq("|w_hy| <= a", std::abs(w_hy), a));
  conclude(v);
  return v;
}

Verdict check_lstm_ergodicity(const CellParams& params, double a) {
  check_contraction(a);
  if (params.kind != CellKind::kLstm) {
    throw ConfigError("check_lstm_ergodicity needs lstm parameters, got " +
                      std::string(to_string(params.kind)));
  }
  params.validate();
  Verdict v;
  v.rule = "forget-gate-norm";
  v.premises.push_back("innovations have a positive continuous density and finite second moment");
  v.premises.push_back("inputs scaled to [-1, 1]");
  v.premises.push_back("output bound M < inf holds for output " +
                       std::string(to_string(params.output_function)));
  const double norm_sum = linf_norm(params.at("W_fh")) + linf_norm(params.at("W_fy")) +
                          linf_norm(params.at("b_f"));
  v.checks.push_back(leq("sigmoid(||W_fh||_inf + ||W_fy||_inf + ||b_f||_inf) <= a",
                         sigmoid(norm_sum), a));
  if (params.dims.input == 1 && params.dims.hidden == 1 && params.dims.output == 1 &&
      (params.output_function == Activation::kSigmoid ||
       params.output_function == Activation::kSoftmax)) {
    const double s = params.at("W_fh")(0, 0) + params.at("W_fy")(0, 0) + params.at("b_f")(0, 0);
    v.checks.push_back(leq("|sigmoid(w_fh + w_fy + b_f)| <= a", std::abs(sigmoid(s)), a));
  }
  conclude(v);
  return v;
}

Verdict check_linear_mc(const Eigen::MatrixXd& W) {
  Verdict v;
  v.rule = "spectral-radius";
  v.premises.push_back("innovations have a positive continuous density and finite second moment");
  const double rho = spectral_radius(W);
  v.checks.push_back({"rho(W) < 1", rho, 1.0, rho < 1.0});
  v.conclusion = rho < 1.0 ? Conclusion::kShortMemoryProven : Conclusion::kNotGeometricallyErgodic;
  return v;
}

std::string verdict_to_json(const Verdict& v) {
  nlohmann::ordered_json j;
  j["format"] = "lmrnn.verdict";
  j["version"] = 1;
  j["conclusion"] = std::string(to_string(v.conclusion));
  j["rule"] = v.rule;
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const auto& c : v.checks) {
    checks.push_back({{"name", c.name}, {"lhs", c.lhs}, {"bound", c.bound},
                      {"satisfied", c.satisfied}});
  }
  j["checks"] = std::move(checks);
  j["premises"] = v.premises;
  return j.dump(2);
}

}  // namespace lmrnn
