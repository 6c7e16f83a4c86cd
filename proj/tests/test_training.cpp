#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "lmrnn/errors.hpp"
#include "lmrnn/procgen.hpp"
#include "lmrnn/training.hpp"
#include "support.hpp"
#include "welch_fixtures.hpp"

using namespace lmrnn;

namespace {

TimeSeries ar1_series(std::size_t n, std::uint64_t seed, Split split) {
  ArfimaSpec s;
  s.ar = {0.5};
  TimeSeries ts = generate_arfima(s, n, seed);
  ts.split = split;
  return ts;
}

TrainConfig small_config(CellKind kind, std::size_t max_steps) {
  TrainConfig c;
  c.kind = kind;
  c.hidden = 4;
  c.K = 20;
  c.rule.max_steps = max_steps;
  return c;
}

}  // namespace

TEST_CASE("Adam leaves parameters unchanged for zero gradients") {
  ParamMap p{{"a", Eigen::MatrixXd::Constant(2, 2, 1.5)}};
  ParamMap g{{"a", Eigen::MatrixXd::Zero(2, 2)}};
  AdamState st = adam_init(p);
  adam_update(p, g, st);
  CHECK(p.at("a") == Eigen::MatrixXd::Constant(2, 2, 1.5));
  CHECK(st.step == 1);
}

TEST_CASE("first Adam step has magnitude lr") {
  ParamMap p{{"a", Eigen::MatrixXd::Zero(1, 3)}};
  ParamMap g{{"a", Eigen::MatrixXd(1, 3)}};
  g.at("a") << 3.0, -0.2, 50.0;
  AdamState st = adam_init(p);
  adam_update(p, g, st);
  CHECK(p.at("a")(0, 0) == doctest::Approx(-0.01).epsilon(1e-6));
  CHECK(p.at("a")(0, 1) == doctest::Approx(0.01).epsilon(1e-6));
  CHECK(p.at("a")(0, 2) == doctest::Approx(-0.01).epsilon(1e-6));
}

TEST_CASE("Adam minimises a quadratic") {
  ParamMap p{{"x", Eigen::MatrixXd::Constant(1, 1, 3.0)}};
  AdamState st = adam_init(p, {0.05, 0.9, 0.999, 1e-8});
  for (int s = 0; s < 3000; ++s) {
    ParamMap g{{"x", 2.0 * p.at("x")}};
    adam_update(p, g, st);
  }
  CHECK(std::abs(p.at("x")(0, 0)) < 1e-3);
}

TEST_CASE("Adam is invariant to gradient scale") {
  ParamMap a{{"x", Eigen::MatrixXd::Constant(1, 1, 1.0)}};
  ParamMap b = a;
  AdamState sa = adam_init(a, {0.01, 0.9, 0.999, 0.0});
  AdamState sb = sa;
  Rng rng(1, Stream::kSpec);
  for (int s = 0; s < 50; ++s) {
    const double v = rng.normal();
    adam_update(a, ParamMap{{"x", Eigen::MatrixXd::Constant(1, 1, v)}}, sa);
    adam_update(b, ParamMap{{"x", Eigen::MatrixXd::Constant(1, 1, 1000.0 * v)}}, sb);
  }
  CHECK(a.at("x")(0, 0) == doctest::Approx(b.at("x")(0, 0)).epsilon(1e-12));
}

TEST_CASE("Adam shape errors") {
  ParamMap p{{"a", Eigen::MatrixXd::Zero(2, 2)}};
  AdamState st = adam_init(p);
  CHECK_THROWS_AS(adam_update(p, ParamMap{{"a", Eigen::MatrixXd::Zero(2, 1)}}, st), ShapeError);
  CHECK_THROWS_AS(adam_update(p, ParamMap{{"b", Eigen::MatrixXd::Zero(2, 2)}}, st), ShapeError);
  CHECK_THROWS_AS(adam_update(p, ParamMap{}, st), ShapeError);

  const CellParams cp = init_params(CellKind::kRnn, {1, 2, 1}, 1, 1);
  const auto r = adam_step(cp, backward(cp, forward(cp, Eigen::MatrixXd::Ones(3, 1)).cache,
                                        Eigen::MatrixXd::Ones(3, 1)),
                           adam_init(cp.tensors));
  CHECK(r.state.step == 1);
  CHECK(r.params.at("b_z")(0, 0) == doctest::Approx(-0.01).epsilon(1e-6));
}

TEST_CASE("stopping rule validation") {
  StoppingRule r;
  CHECK_NOTHROW(r.validate());
  r.patience = 0;
  CHECK_THROWS_AS(r.validate(), ConfigError);
  r = {};
  r.min_loss_drop = 0.0;
  CHECK_THROWS_AS(r.validate(), ConfigError);
}

TEST_CASE("a single step records two losses") {
  const auto data = ar1_series(300, 1, {200, 50, 50});
  const auto res = train(small_config(CellKind::kRnn, 1), data, 1);
  CHECK(res.record.steps == 1);
  CHECK(res.record.train_loss.size() == 2);
  CHECK(res.record.val_loss.size() == 2);
  CHECK(res.record.stop_reason == StopReason::kMaxSteps);
}

TEST_CASE("rising loss stops after patience steps") {
  const auto data = ar1_series(300, 2, {200, 50, 50});
  TrainConfig c = small_config(CellKind::kRnn, 1000);
  c.adam.lr = -0.01;
  c.rule.patience = 5;
  const auto res = train(c, data, 3);
  CHECK(res.record.stop_reason == StopReason::kIncreasing);
  CHECK(res.record.steps == 5);
  for (std::size_t s = 1; s < res.record.train_loss.size(); ++s) {
    CHECK(res.record.train_loss[s] > res.record.train_loss[s - 1]);
  }
}

TEST_CASE("small drop stops the run") {
  const auto data = ar1_series(300, 2, {200, 50, 50});
  TrainConfig c = small_config(CellKind::kRnn, 5000);
  c.rule.min_loss_drop = 1.0;
  const auto res = train(c, data, 3);
  CHECK(res.record.stop_reason == StopReason::kSmallDrop);
  CHECK(res.record.steps == 1);
}

TEST_CASE("checkpoint is the best validation entry and replays") {
  const auto data = ar1_series(400, 4, {250, 80, 70});
  const auto res = train(small_config(CellKind::kMrnnf, 40), data, 5);
  const auto& vl = res.record.val_loss;
  std::size_t best = 0;
  for (std::size_t s = 1; s < vl.size(); ++s) {
    if (vl[s] < vl[best]) best = s;
  }
  CHECK(res.record.best_step == best);

  const Eigen::MatrixXd y = data.values.topRows(330);
  const auto out = forward(res.checkpoint, lagged_inputs(y)).outputs;
  const double replay = (out.bottomRows(80) - y.bottomRows(80)).squaredNorm() / 80.0;
  CHECK(replay == doctest::Approx(vl[best]).epsilon(1e-12));

  const auto again = train(small_config(CellKind::kMrnnf, 40), data, 5);
  CHECK(again.record.train_loss == res.record.train_loss);
  CHECK(again.record.test.rmse == res.record.test.rmse);
}

TEST_CASE("train split errors") {
  auto data = ar1_series(100, 1, {50, 20, 20});
  data.split.reset();
  CHECK_THROWS_AS((void)train(small_config(CellKind::kRnn, 1), data, 1), ConfigError);
  data.split = Split{50, 0, 20};
  CHECK_THROWS_AS((void)train(small_config(CellKind::kRnn, 1), data, 1), ConfigError);
  data.split = Split{50, 40, 20};
  CHECK_THROWS_AS((void)train(small_config(CellKind::kRnn, 1), data, 1), ConfigError);
}

TEST_CASE("metrics") {
  Eigen::MatrixXd pred(3, 1);
  Eigen::MatrixXd target(3, 1);
  pred << 1.0, 2.0, 4.0;
  target << 2.0, 2.0, 2.0;
  auto m = metrics(pred, target);
  CHECK(m.rmse == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(m.mae == doctest::Approx(1.0));
  REQUIRE(m.mape.has_value());
  CHECK(*m.mape == doctest::Approx(0.5));

  target << 0.0, 2.0, 0.0;
  m = metrics(pred, target);
  CHECK(m.mape_skipped == 2);
  CHECK(*m.mape == doctest::Approx(0.0));
  target.setZero();
  CHECK_FALSE(metrics(pred, target).mape.has_value());
  CHECK(metrics(target, target).rmse == 0.0);
  CHECK_THROWS_AS((void)metrics(pred, Eigen::MatrixXd::Zero(2, 1)), ShapeError);
}

TEST_CASE("rolling forecasts are causal") {
  const CellParams p = init_params(CellKind::kMrnnf, {1, 3, 1}, 10, 2);
  Rng rng(3, Stream::kSpec);
  Eigen::MatrixXd y = testing::random_matrix(60, 1, rng);
  const auto a = rolling_forecast(p, y, 30, 60);
  CHECK(a.rows() == 30);
  Eigen::MatrixXd z = y;
  z.bottomRows(20).setConstant(99.0);  // rows 40..59
  const auto b = rolling_forecast(p, z, 30, 60);
  CHECK((a.topRows(11) - b.topRows(11)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(std::abs(a(12, 0) - b(12, 0)) > 0.0);

  const auto zero = init_params(CellKind::kMrnnf, {1, 3, 1}, 10, 0, InitScheme::kZero);
  CHECK(rolling_forecast(zero, y, 0, 60).isZero(0.0));
  CHECK_THROWS_AS((void)rolling_forecast(p, y, 10, 10), DomainError);
  CHECK_THROWS_AS((void)rolling_forecast(p, y, 10, 61), DomainError);
}

TEST_CASE("RNN learns AR(1) to within five percent of the noise level") {
  const auto data = ar1_series(2000, 7, {1200, 400, 400});
  TrainConfig c = small_config(CellKind::kRnn, 400);
  c.hidden = 8;
  const auto res = train(c, data, 1);
  CAPTURE(res.record.test.rmse);
  CHECK(std::abs(res.record.test.rmse - 1.0) < 0.05);
}

TEST_CASE("input scaling is inverted before metrics") {
  auto data = ar1_series(400, 4, {250, 80, 70});
  data.values = data.values * 100.0 + Eigen::MatrixXd::Constant(400, 1, 5.0);
  TrainConfig c = small_config(CellKind::kRnn, 30);
  c.scale_inputs = true;
  const auto res = train(c, data, 5);
  CHECK(res.record.test.rmse > 10.0);
  CHECK(res.record.test.rmse < 300.0);
}

TEST_CASE("multi-seed experiments") {
  const auto data = ar1_series(300, 3, {200, 50, 50});
  const auto c = small_config(CellKind::kMrnnf, 15);
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4};
  const auto a = multi_seed_experiment(c, data, seeds, 2);
  const auto b = multi_seed_experiment(c, data, seeds, 1);
  REQUIRE(a.runs.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(a.runs[i].seed == seeds[i]);
    CHECK(a.runs[i].test.rmse == b.runs[i].test.rmse);
  }
  CHECK(a.summary.rmse.count == 4);
  CHECK(a.summary.rmse.min <= a.summary.rmse.mean);
  CHECK(a.summary.rmse.std >= 0.0);
  CHECK_THROWS_AS((void)multi_seed_experiment(c, data, {1}, 1), ConfigError);
}

TEST_CASE("summaries skip failed runs") {
  std::vector<RunRecord> runs(3);
  runs[0].test.rmse = 1.0;
  runs[1].test.rmse = 3.0;
  runs[2].failed = true;
  runs[2].test.rmse = 100.0;
  const auto s = summarize(runs);
  CHECK(s.runs == 3);
  CHECK(s.failed == 1);
  CHECK(s.rmse.mean == doctest::Approx(2.0));
  CHECK(s.rmse.std == doctest::Approx(std::sqrt(2.0)));
  CHECK(s.rmse.min == 1.0);
}

TEST_CASE("Welch test") {
  const std::vector<double> a{1.0, 2.0, 3.0, 4.0};
  const auto same = welch_ttest(a, a);
  CHECK(same.t == 0.0);
  CHECK(same.p_one_sided == doctest::Approx(0.5));

  Rng rng(2, Stream::kSpec);
  std::vector<double> lo(20);
  std::vector<double> hi(20);
  for (std::size_t i = 0; i < 20; ++i) {
    lo[i] = rng.normal(0.0, 0.1);
    hi[i] = rng.normal(10.0, 0.1);
  }
  CHECK(welch_ttest(lo, hi).p_one_sided < 1e-10);
  CHECK(welch_ttest(hi, lo).p_one_sided > 1.0 - 1e-10);

  for (const auto& f : testing::welch_fixtures()) {
    const auto r = welch_ttest(f.a, f.b);
    CAPTURE(f.name);
    CHECK(r.t == doctest::Approx(f.t).epsilon(1e-9));
    CHECK(r.df == doctest::Approx(f.df).epsilon(1e-9));
    CHECK(r.p_one_sided == doctest::Approx(f.p).epsilon(1e-6));
  }

  CHECK_THROWS_AS((void)welch_ttest(std::vector<double>{1.0}, a), StatisticsError);
  CHECK_THROWS_AS((void)welch_ttest(std::vector<double>{1.0, 1.0}, std::vector<double>{2.0, 2.0}),
                  StatisticsError);
  CHECK_THROWS_AS(
      (void)welch_ttest(std::vector<double>{1.0, std::numeric_limits<double>::quiet_NaN()}, a),
      StatisticsError);
}
