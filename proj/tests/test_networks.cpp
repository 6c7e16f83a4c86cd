#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "lmrnn/errors.hpp"
#include "lmrnn/fracdiff.hpp"
#include "lmrnn/networks.hpp"
#include "lmrnn/rng.hpp"
#include "support.hpp"

using namespace lmrnn;

namespace {

Eigen::MatrixXd random_inputs(Eigen::Index T, Eigen::Index p, std::uint64_t seed) {
  Rng rng(seed, Stream::kSpec);
  return testing::random_matrix(T, p, rng);
}

CellParams random_cell(CellKind kind, const Dims& dims, std::size_t K, std::uint64_t seed,
                       double scale = 0.8) {
  CellParams p = init_params(kind, dims, K, seed);
  testing::randomize(p, 100 + seed, scale);
  return p;
}

}  // namespace

TEST_CASE("analytic gradients match central differences") {
  for (CellKind kind : kAllCellKinds) {
    for (std::uint64_t s : {1, 2, 3}) {
      const CellParams p = random_cell(kind, {2, 3, 2}, 5, s);
      Rng rng(s, Stream::kSpec);
      const auto x = testing::random_matrix(12, 2, rng);
      const auto G = testing::random_matrix(12, 2, rng);
      const auto gc = testing::check_gradients(p, x, G, 1e-5, 1e-8);
      CAPTURE(to_string(kind));
      CAPTURE(gc.worst_name);
      CHECK(gc.worst_rel < 1e-5);
    }
  }
}

TEST_CASE("gradients over a prefix and with activations") {
  for (Activation act : {Activation::kSigmoid, Activation::kIdentity}) {
    for (CellKind kind : {CellKind::kMrnn, CellKind::kMlstm, CellKind::kLstm}) {
      CellParams p = random_cell(kind, {1, 2, 1}, 4, 9, 0.5);
      p.hidden_activation = act;
      p.output_function = Activation::kSigmoid;
      Rng rng(4, Stream::kSpec);
      const auto x = testing::random_matrix(10, 1, rng);
      const auto G = testing::random_matrix(10, 1, rng);
      CAPTURE(to_string(kind));
      CHECK(testing::check_gradients(p, x, G, 1e-5, 1e-8).worst_rel < 1e-5);
    }
  }
}

TEST_CASE("zero output gradient gives zero parameter gradient") {
  for (CellKind kind : kAllCellKinds) {
    const CellParams p = random_cell(kind, {1, 2, 1}, 3, 4);
    const auto fr = forward(p, random_inputs(8, 1, 1));
    const auto g = backward(p, fr.cache, Eigen::MatrixXd::Zero(8, 1));
    for (const auto& [name, t] : p.tensors) {
      REQUIRE(g.count(name) == 1);
      CHECK(g.at(name).rows() == t.rows());
      CHECK(g.at(name).cols() == t.cols());
      CHECK(g.at(name).isZero(0.0));
    }
  }
}

TEST_CASE("backward contract errors") {
  const CellParams p = random_cell(CellKind::kRnn, {1, 2, 1}, 1, 1);
  const CellParams other = random_cell(CellKind::kLstm, {1, 2, 1}, 1, 1);
  const auto fr = forward(p, random_inputs(6, 1, 1));
  CHECK_THROWS_AS((void)backward(other, fr.cache, Eigen::MatrixXd::Zero(6, 1)), ContractError);
  CHECK_THROWS_AS((void)backward(p, fr.cache, Eigen::MatrixXd::Zero(7, 1)), ContractError);
  CHECK_THROWS_AS((void)backward(p, fr.cache, Eigen::MatrixXd::Zero(6, 2)), ContractError);
}

TEST_CASE("initialisation") {
  for (CellKind kind : kAllCellKinds) {
    const auto a = init_params(kind, {2, 4, 1}, 10, 7);
    const auto b = init_params(kind, {2, 4, 1}, 10, 7);
    const auto c = init_params(kind, {2, 4, 1}, 10, 8);
    bool differs = false;
    for (const auto& spec : param_layout(kind, {2, 4, 1})) {
      const auto& t = a.at(spec.name);
      CHECK(t.rows() == spec.rows);
      CHECK(t.cols() == spec.cols);
      CHECK(t == b.at(spec.name));
      if (spec.bias) {
        CHECK(t.isZero(0.0));
      } else {
        CHECK(t.cwiseAbs().maxCoeff() <= 0.5);
        differs = differs || t != c.at(spec.name);
      }
    }
    CHECK(differs);
    CHECK_NOTHROW(a.validate());
  }
  const auto m = init_params(CellKind::kMrnnf, {1, 4, 1}, 10, 1);
  CHECK(memory_from_theta(m.at("theta_d")(0, 0)) == 0.25);
  const auto z = init_params(CellKind::kLstm, {1, 4, 1}, 1, 1, InitScheme::kZero);
  for (const auto& [name, t] : z.tensors) CHECK(t.isZero(0.0));
}

TEST_CASE("shape validation") {
  CellParams p = init_params(CellKind::kMrnn, {1, 2, 1}, 4, 1);
  p.at("W_m") = Eigen::MatrixXd::Zero(2, 2);
  CHECK_THROWS_AS(p.validate(), ShapeError);
  CellParams q = init_params(CellKind::kRnn, {1, 2, 1}, 1, 1);
  q.tensors.erase("b_h");
  CHECK_THROWS_AS(q.validate(), ShapeError);
  CHECK_THROWS_AS((void)forward(init_params(CellKind::kRnn, {2, 2, 1}, 1, 1), random_inputs(5, 1, 1)),
                  ShapeError);
}

TEST_CASE("zero weights produce the zero output") {
  for (CellKind kind : kAllCellKinds) {
    const auto p = init_params(kind, {2, 3, 1}, 5, 0, InitScheme::kZero);
    const auto out = forward(p, random_inputs(20, 2, 3)).outputs;
    CAPTURE(to_string(kind));
    CHECK(out.isZero(0.0));
  }
}

TEST_CASE("MRNN with W_d = 0 equals MRNNF with the same bias") {
  CellParams mrnn = random_cell(CellKind::kMrnn, {2, 3, 1}, 6, 5);
  mrnn.at("W_d").setZero();
  CellParams mrnnf = init_params(CellKind::kMrnnf, {2, 3, 1}, 6, 0);
  for (auto& [name, t] : mrnnf.tensors) {
    if (name != "theta_d") t = mrnn.at(name);
  }
  mrnnf.at("theta_d") = mrnn.at("b_d");
  const auto x = random_inputs(30, 2, 6);
  CHECK((forward(mrnn, x).outputs - forward(mrnnf, x).outputs).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("scalar MLSTMF against a direct recursion") {
  CellParams p = random_cell(CellKind::kMlstmf, {1, 1, 1}, 7, 3);
  p.at("theta_d")(0, 0) = 0.4;
  const auto x = random_inputs(25, 1, 8);
  const auto got = forward(p, x).outputs;

  const double d = 0.5 / (1.0 + std::exp(-0.4));
  std::vector<double> w(8, 1.0);
  for (std::size_t j = 1; j < 8; ++j) w[j] = w[j - 1] * (static_cast<double>(j) - 1.0 - d) / static_cast<double>(j);
  auto s = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  auto g = [&](const char* n) { return p.at(n)(0, 0); };
  std::vector<double> c;
  double h = 0.0;
  for (Eigen::Index t = 0; t < x.rows(); ++t) {
    const double xt = x(t, 0);
    const double i = s(g("W_ih") * h + g("W_ix") * xt + g("b_i"));
    const double o = s(g("W_oh") * h + g("W_ox") * xt + g("b_o"));
    const double ct = std::tanh(g("W_ch") * h + g("W_cx") * xt + g("b_c"));
    double mem = 0.0;
    for (std::size_t j = 1; j <= 7 && j <= c.size(); ++j) mem -= w[j] * c[c.size() - j];
    c.push_back(mem + i * ct);
    h = o * std::tanh(c.back());
    CHECK(got(t, 0) == doctest::Approx(g("W_zh") * h + g("b_z")).epsilon(1e-13));
  }
  CHECK(memory_cell_update(std::vector<double>{}, w, 0.7) == 0.7);
}

TEST_CASE("dynamic memory stays in (0, 1/2)") {
  for (CellKind kind : {CellKind::kMrnn, CellKind::kMlstm}) {
    const CellParams p = random_cell(kind, {1, 3, 1}, 5, 2, 6.0);
    const auto fr = forward(p, random_inputs(50, 1, 2) * 5.0);
    CHECK(fr.cache.d.minCoeff() > 0.0);
    CHECK(fr.cache.d.maxCoeff() < 0.5);
  }
}

TEST_CASE("LSTM with a constant forget gate equals MLSTMF with K = 1") {
  const double d = 0.25;
  CellParams m = random_cell(CellKind::kMlstmf, {1, 2, 1}, 1, 5);
  m.at("theta_d").setZero();
  CellParams l = init_params(CellKind::kLstm, {1, 2, 1}, 1, 0, InitScheme::kZero);
  for (const char* gate : {"i", "o", "c"}) {
    l.at(std::string("W_") + gate + "h") = m.at(std::string("W_") + gate + "h");
    l.at(std::string("W_") + gate + "y") = m.at(std::string("W_") + gate + "x");
    l.at(std::string("b_") + gate) = m.at(std::string("b_") + gate);
  }
  l.at("b_f").setConstant(std::log(d / (1 - d)));
  l.at("W_zh") = m.at("W_zh");
  l.at("b_z") = m.at("b_z");
  const auto x = random_inputs(40, 1, 4);
  CHECK((forward(l, x).outputs - forward(m, x).outputs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("outputs are causal and the filter window has length K") {
  CellParams p = init_params(CellKind::kMrnnf, {1, 2, 1}, 5, 3);
  p.hidden_activation = Activation::kIdentity;
  p.at("W_hx").setZero();
  p.at("W_m").leftCols(2).setZero();  // W_mm
  const auto x = random_inputs(30, 1, 9);
  Eigen::MatrixXd y = x;
  y(10, 0) += 1.0;
  const auto a = forward(p, x).outputs;
  const auto b = forward(p, y).outputs;
  for (Eigen::Index t = 0; t < 30; ++t) {
    const double diff = std::abs(a(t, 0) - b(t, 0));
    if (t < 10 || t >= 15) {
      CHECK(diff < 1e-14);
    } else {
      CHECK(diff > 1e-6);
    }
  }
  for (CellKind kind : kAllCellKinds) {
    const CellParams q = random_cell(kind, {1, 2, 1}, 4, 6);
    const auto u = forward(q, x).outputs;
    const auto v = forward(q, y).outputs;
    CHECK((u.topRows(10) - v.topRows(10)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("JSON round trip") {
  for (CellKind kind : kAllCellKinds) {
    CellParams p = random_cell(kind, {2, 3, 1}, 9, 4);
    p.hidden_activation = Activation::kSigmoid;
    const auto q = params_from_json(params_to_json(p));
    CHECK(q.kind == p.kind);
    CHECK(q.K == p.K);
    CHECK(q.hidden_activation == Activation::kSigmoid);
    for (const auto& [name, t] : p.tensors) CHECK(q.at(name) == t);
  }
  CHECK_THROWS_AS((void)params_from_json("{\"format\":\"other\"}"), ConfigError);
  CHECK_THROWS_AS((void)params_from_json("not json"), ConfigError);
}

TEST_CASE("squared error loss") {
  Eigen::MatrixXd pred(2, 1);
  Eigen::MatrixXd target(2, 1);
  pred << 1.0, 3.0;
  target << 0.0, 1.0;
  const auto l = loss_mse(pred, target);
  CHECK(l.loss == doctest::Approx(2.5));
  CHECK(l.grad(0, 0) == doctest::Approx(1.0));
  CHECK(l.grad(1, 0) == doctest::Approx(2.0));
  CHECK_THROWS_AS((void)loss_mse(pred, Eigen::MatrixXd::Zero(3, 1)), ShapeError);
}

TEST_CASE("kind names") {
  for (CellKind kind : kAllCellKinds) CHECK(parse_cell_kind(to_string(kind)) == kind);
  CHECK_THROWS_AS((void)parse_cell_kind("gru"), ConfigError);
}
