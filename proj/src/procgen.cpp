#include "lmrnn/procgen.hpp"

#include <cmath>
#include <string>

#include "lmrnn/diagnostics.hpp"
#include "lmrnn/errors.hpp"
#include "lmrnn/fracdiff.hpp"
#include "lmrnn/rng.hpp"

namespace lmrnn {
namespace {

constexpr double kStationarityMargin = 1e-6;
constexpr std::size_t kMinTruncation = 1000;

void check_ar_stationary(const std::vector<double>& ar) {
  if (ar.empty()) return;
  const auto p = static_cast<Eigen::Index>(ar.size());
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) companion(0, i) = ar[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
  const double rho = spectral_radius(companion);
  if (!(rho < 1.0 - kStationarityMargin)) {
    throw DomainError("generate_arfima: AR polynomial is not stationary (companion spectral radius " +
                      std::to_string(rho) + ")");
  }
}

std::vector<std::string> output_names(std::size_t p) {
  if (p == 1) return {"y"};
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= p; ++i) names.push_back("y" + std::to_string(i));
  return names;
}

void require_shape(const ProcessSpec& s, const char* name, std::size_t rows, std::size_t cols) {
  auto it = s.tensors.find(name);
  if (it == s.tensors.end()) {
    throw ShapeError(std::string("process spec is missing tensor ") + name);
  }
  if (it->second.rows() != static_cast<Eigen::Index>(rows) ||
      it->second.cols() != static_cast<Eigen::Index>(cols)) {
    throw ShapeError(std::string("process tensor ") + name + " must be " + std::to_string(rows) +
                     "x" + std::to_string(cols));
  }
}

void check_state(const Eigen::VectorXd& v, std::size_t t) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]) || std::abs(v[i]) > kDivergenceBound) {
      throw DivergenceError("network process diverged", t);
    }
  }
}

}  // namespace

ArfimaSpec arfima_preset_spec() {
  ArfimaSpec s;
  s.ar = {0.7, -0.4};
  s.ma = {-0.2};
  s.d = 0.4;
  s.noise_std = 1.0;
  return s;
}

TimeSeries generate_arfima(const ArfimaSpec& spec, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw DomainError("generate_arfima: n must be positive");
  if (!(spec.d >= 0.0 && spec.d < 0.5)) {
    throw DomainError("generate_arfima: d must lie in [0, 0.5), got " + std::to_string(spec.d));
  }
  if (!(spec.noise_std >= 0.0) || !std::isfinite(spec.noise_std)) {
    throw DomainError("generate_arfima: noise_std must be non-negative");
  }
  if (spec.truncation != 0 && spec.truncation < kMinTruncation) {
    throw DomainError("generate_arfima: truncation must be 0 (full) or at least 1000");
  }
  check_ar_stationary(spec.ar);

  const std::size_t total = n + spec.burn_in;
  Rng rng(seed, Stream::kNoise);
  std::vector<double> eps(total);
  for (auto& e : eps) e = spec.noise_std * rng.normal();

  std::vector<double> u(total, 0.0);
  for (std::size_t t = 0; t < total; ++t) {
    double v = eps[t];
    for (std::size_t i = 1; i <= spec.ar.size() && i <= t; ++i) v += spec.ar[i - 1] * u[t - i];
    for (std::size_t j = 1; j <= spec.ma.size() && j <= t; ++j) v += spec.ma[j - 1] * eps[t - j];
    u[t] = v;
  }
  const auto y = apply_fracint(u, spec.d, spec.truncation);
  std::vector<double> kept(y.begin() + static_cast<std::ptrdiff_t>(spec.burn_in), y.end());
  return TimeSeries::univariate(kept);
}

std::string to_string(ProcessKind k) {
  switch (k) {
    case ProcessKind::kLinearMc: return "linear-mc";
    case ProcessKind::kRnn: return "rnn";
    case ProcessKind::kLstm: return "lstm";
  }
  return "rnn";
}

ProcessKind parse_process_kind(const std::string& name) {
  if (name == "linear-mc") return ProcessKind::kLinearMc;
  if (name == "rnn") return ProcessKind::kRnn;
  if (name == "lstm") return ProcessKind::kLstm;
  throw ConfigError("unknown process kind '" + name + "'");
}

void ProcessSpec::validate() const {
  if (p == 0 || q == 0) throw ShapeError("process dims must be positive");
  switch (kind) {
    case ProcessKind::kLinearMc:
      require_shape(*this, "W", p + q, p + q);
      return;
    case ProcessKind::kRnn:
      require_shape(*this, "W_hh", q, q);
      require_shape(*this, "W_hy", q, p);
      require_shape(*this, "b_h", q, 1);
      break;
    case ProcessKind::kLstm:
      for (const char* g : {"f", "i", "o", "c"}) {
        require_shape(*this, (std::string("W_") + g + "h").c_str(), q, q);
        require_shape(*this, (std::string("W_") + g + "y").c_str(), q, p);
        require_shape(*this, (std::string("b_") + g).c_str(), q, 1);
      }
      break;
  }
  require_shape(*this, "W_zh", p, q);
  require_shape(*this, "b_z", p, 1);
}

TimeSeries generate_network_process(const ProcessSpec& spec, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw DomainError("generate_network_process: n must be positive");
  if (!(spec.noise_std >= 0.0)) throw DomainError("generate_network_process: noise_std < 0");
  spec.validate();
  const auto p = static_cast<Eigen::Index>(spec.p);
  const auto q = static_cast<Eigen::Index>(spec.q);
  Rng rng(seed, Stream::kNoise);
  auto noise = [&] {
    Eigen::VectorXd e(p);
    for (Eigen::Index i = 0; i < p; ++i) e[i] = spec.noise_std * rng.normal();
    return e;
  };
  auto T = [&](const char* name) -> const Eigen::MatrixXd& { return spec.tensors.find(name)->second; };

  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), p);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd h = Eigen::VectorXd::Zero(q);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(q);
  auto gate = [&](char g) {
    const std::string s(1, g);
    Eigen::VectorXd a = T(("W_" + s + "h").c_str()) * h + T(("W_" + s + "y").c_str()) * y +
                        T(("b_" + s).c_str());
    return a;
  };

  for (std::size_t t = 0; t < n; ++t) {
    switch (spec.kind) {
      case ProcessKind::kLinearMc: {
        Eigen::VectorXd state(p + q);
        state << y, h;
        state = T("W") * state;
        state.head(p) += noise();
        check_state(state, t);
        y = state.head(p);
        h = state.tail(q);
        break;
      }
      case ProcessKind::kRnn: {
        h = activate(spec.activation, T("W_hh") * h + T("W_hy") * y + T("b_h"));
        check_state(h, t);
        y = activate(spec.output_function, T("W_zh") * h + T("b_z")) + noise();
        break;
      }
      case ProcessKind::kLstm: {
        auto sig = [](const Eigen::VectorXd& a) {
          return Eigen::VectorXd(a.unaryExpr([](double v) { return sigmoid(v); }));
        };
        const Eigen::VectorXd f = sig(gate('f'));
        const Eigen::VectorXd i = sig(gate('i'));
        const Eigen::VectorXd o = sig(gate('o'));
        const Eigen::VectorXd ct = activate(spec.activation, gate('c'));
        c = f.cwiseProduct(c) + i.cwiseProduct(ct);
        check_state(c, t);
        h = o.cwiseProduct(activate(spec.activation, c));
        y = activate(spec.output_function, T("W_zh") * h + T("b_z")) + noise();
        break;
      }
    }
    check_state(y, t);
    out.row(static_cast<Eigen::Index>(t)) = y.transpose();
  }
  return TimeSeries(std::move(out), output_names(spec.p));
}

ProcessSpec random_rnn_process(std::size_t p, std::size_t q, double scale, std::uint64_t seed) {
  ProcessSpec s;
  s.kind = ProcessKind::kRnn;
  s.p = p;
  s.q = q;
  Rng rng(seed, Stream::kSpec);
  auto draw = [&](Eigen::Index r, Eigen::Index c) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index j = 0; j < c; ++j) {
      for (Eigen::Index i = 0; i < r; ++i) m(i, j) = rng.uniform(-scale, scale);
    }
    return m;
  };
  const auto P = static_cast<Eigen::Index>(p);
  const auto Q = static_cast<Eigen::Index>(q);
  s.tensors["W_hh"] = draw(Q, Q);
  s.tensors["W_hy"] = draw(Q, P);
  s.tensors["b_h"] = Eigen::MatrixXd::Zero(Q, 1);
  s.tensors["W_zh"] = draw(P, Q);
  s.tensors["b_z"] = Eigen::MatrixXd::Zero(P, 1);
  return s;
}

ProcessSpec rnn_process_preset() { return random_rnn_process(1, 4, 0.9, 7); }

}  // namespace lmrnn
