#include "lmrnn/training.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "lmrnn/errors.hpp"

namespace lmrnn {
namespace {

void check_congruent(const ParamMap& a, const ParamMap& b, const char* what) {
  if (a.size() != b.size()) {
    throw ShapeError(std::string("adam: ") + what + " has a different tensor count");
  }
  for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib) {
    if (ia->first != ib->first || ia->second.rows() != ib->second.rows() ||
        ia->second.cols() != ib->second.cols()) {
      throw ShapeError(std::string("adam: ") + what + " tensor '" + ib->first +
                       "' does not match parameter '" + ia->first + "'");
    }
  }
}

// Affine map of each column taking the training block onto [-1, 1].
struct Scaler {
  Eigen::RowVectorXd lo;
  Eigen::RowVectorXd span;

  Eigen::MatrixXd forward(const Eigen::MatrixXd& y) const {
    return ((y.rowwise() - lo).array().rowwise() / span.array() * 2.0 - 1.0).matrix();
  }
  Eigen::MatrixXd inverse(const Eigen::MatrixXd& s) const {
    return (((s.array() + 1.0) * 0.5).rowwise() * span.array()).matrix().rowwise() + lo;
  }
};

Scaler fit_scaler(const Eigen::MatrixXd& train_block) {
  Scaler s;
  s.lo = train_block.colwise().minCoeff();
  s.span = train_block.colwise().maxCoeff() - s.lo;
  if ((s.span.array() <= 0.0).any()) {
    throw DegenerateSeriesError("scale_inputs: training block is constant");
  }
  return s;
}

void check_split(const TimeSeries& data) {
  if (!data.split) throw ConfigError("train: series has no train/val/test split");
  const Split& sp = *data.split;
  if (sp.n_train == 0 || sp.n_val == 0 || sp.n_test == 0) {
    throw ConfigError("train: train, validation and test blocks must be non-empty");
  }
  if (sp.total() > data.length()) {
    throw ConfigError("train: split sizes sum to " + std::to_string(sp.total()) +
                      " but the series has " + std::to_string(data.length()) + " rows");
  }
  if (data.dims() == 0) throw ConfigError("train: series has no columns");
}

MetricSummary summarize_values(const std::vector<double>& v) {
  MetricSummary s;
  s.count = v.size();
  if (v.empty()) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.std = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  s.min = *std::min_element(v.begin(), v.end());
  return s;
}

}  // namespace

AdamState adam_init(const ParamMap& params, const AdamConfig& hyper) {
  AdamState s;
  s.hyper = hyper;
  for (const auto& [name, t] : params) {
    s.m.emplace(name, Eigen::MatrixXd::Zero(t.rows(), t.cols()));
    s.v.emplace(name, Eigen::MatrixXd::Zero(t.rows(), t.cols()));
  }
  return s;
}

void adam_update(ParamMap& params, const ParamMap& grads, AdamState& state) {
  check_congruent(params, grads, "gradient");
  if (state.m.empty() && state.v.empty() && state.step == 0) {
    state = adam_init(params, state.hyper);
  }
  check_congruent(params, state.m, "first moment");
  check_congruent(params, state.v, "second moment");
  const AdamConfig& h = state.hyper;
  ++state.step;
  const double c1 = 1.0 - std::pow(h.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(h.beta2, static_cast<double>(state.step));
  auto im = state.m.begin();
  auto iv = state.v.begin();
  auto ig = grads.begin();
  for (auto ip = params.begin(); ip != params.end(); ++ip, ++im, ++iv, ++ig) {
    const auto& g = ig->second.array();
    im->second.array() = h.beta1 * im->second.array() + (1.0 - h.beta1) * g;
    iv->second.array() = h.beta2 * iv->second.array() + (1.0 - h.beta2) * g.square();
    ip->second.array() -=
        h.lr * (im->second.array() / c1) / ((iv->second.array() / c2).sqrt() + h.eps);
  }
}

AdamStepResult adam_step(const CellParams& params, const Gradients& grads, const AdamState& state) {
  AdamStepResult r{params, state};
  adam_update(r.params.tensors, grads, r.state);
  return r;
}

void StoppingRule::validate() const {
  if (!(min_loss_drop > 0.0) || patience == 0 || max_steps == 0) {
    throw ConfigError("stopping rule: min_loss_drop, patience and max_steps must be positive");
  }
}

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::kMaxSteps: return "max-steps";
    case StopReason::kSmallDrop: return "small-drop";
    case StopReason::kIncreasing: return "increasing";
  }
  return "max-steps";
}

Metrics metrics(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
    throw ShapeError("metrics: prediction and target shapes differ");
  }
  if (pred.size() == 0) throw ShapeError("metrics: empty input");
  const Eigen::ArrayXXd diff = (pred - target).array();
  Metrics m;
  const double n = static_cast<double>(pred.size());
  m.rmse = std::sqrt(diff.square().sum() / n);
  m.mae = diff.abs().sum() / n;
  double acc = 0.0;
  std::size_t used = 0;
  for (Eigen::Index i = 0; i < target.size(); ++i) {
    const double y = target.data()[i];
    if (std::abs(y) < kMapeThreshold) {
      ++m.mape_skipped;
      continue;
    }
    acc += std::abs(diff.data()[i]) / std::abs(y);
    ++used;
  }
  if (used > 0) m.mape = acc / static_cast<double>(used);
  return m;
}

Eigen::MatrixXd lagged_inputs(const Eigen::MatrixXd& y) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(y.rows(), y.cols());
  if (y.rows() > 1) x.bottomRows(y.rows() - 1) = y.topRows(y.rows() - 1);
  return x;
}

Eigen::MatrixXd rolling_forecast(const CellParams& checkpoint, const Eigen::MatrixXd& series,
                                 std::size_t begin, std::size_t end) {
  if (begin >= end || end > static_cast<std::size_t>(series.rows())) {
    throw DomainError("rolling_forecast: range [" + std::to_string(begin) + ", " +
                      std::to_string(end) + ") is outside the series");
  }
  const auto e = static_cast<Eigen::Index>(end);
  // Row t of the output only sees rows < t of the series, so one causal pass
  // over the prefix equals a refit-free rolling evaluation.
  const auto fr = forward(checkpoint, lagged_inputs(series.topRows(e)));
  return fr.outputs.middleRows(static_cast<Eigen::Index>(begin), e - static_cast<Eigen::Index>(begin));
}

TrainResult train(const TrainConfig& config, const TimeSeries& data, std::uint64_t seed) {
  check_split(data);
  config.rule.validate();
  const auto start = std::chrono::steady_clock::now();
  const Split sp = *data.split;
  const auto n_tr = static_cast<Eigen::Index>(sp.n_train);
  const auto n_fit = static_cast<Eigen::Index>(sp.n_train + sp.n_val);

  Eigen::MatrixXd y = data.values.topRows(static_cast<Eigen::Index>(sp.total()));
  std::optional<Scaler> scaler;
  if (config.scale_inputs) {
    scaler = fit_scaler(y.topRows(n_tr));
    y = scaler->forward(y);
  }
  const Eigen::MatrixXd x_fit = lagged_inputs(y.topRows(n_fit));
  const Eigen::MatrixXd y_train = y.topRows(n_tr);
  const Eigen::MatrixXd y_val = y.middleRows(n_tr, n_fit - n_tr);

  Dims dims{data.dims(), config.hidden, data.dims()};
  CellParams params = init_params(config.kind, dims, config.K, seed, config.init);
  params.hidden_activation = config.hidden_activation;
  params.output_function = config.output_function;
  AdamState adam = adam_init(params.tensors, config.adam);

  TrainResult res;
  RunRecord& rec = res.record;
  rec.seed = seed;
  rec.config_digest = config.config_digest;
  rec.kind = config.kind;
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t rising = 0;

  for (std::size_t s = 0;; ++s) {
    const auto fr = forward(params, x_fit);
    const auto tl = loss_mse(fr.outputs.topRows(n_tr), y_train);
    const double vl = (fr.outputs.bottomRows(n_fit - n_tr) - y_val).squaredNorm() /
                      static_cast<double>(n_fit - n_tr);
    if (!std::isfinite(tl.loss) || !std::isfinite(vl)) {
      throw DivergenceError("training loss is not finite", s);
    }
    rec.train_loss.push_back(tl.loss);
    rec.val_loss.push_back(vl);
    if (vl < best_val) {
      best_val = vl;
      rec.best_step = s;
      res.checkpoint = params;
    }
    if (s > 0) {
      const double drop = rec.train_loss[s - 1] - tl.loss;
      rising = drop < 0.0 ? rising + 1 : 0;
      if (rising >= config.rule.patience) {
        rec.stop_reason = StopReason::kIncreasing;
        break;
      }
      if (drop >= 0.0 && drop < config.rule.min_loss_drop) {
        rec.stop_reason = StopReason::kSmallDrop;
        break;
      }
    }
    if (s == config.rule.max_steps) {
      rec.stop_reason = StopReason::kMaxSteps;
      break;
    }
    const Gradients g = backward(params, fr.cache, tl.grad);
    adam_update(params.tensors, g, adam);
    rec.steps = s + 1;
  }

  Eigen::MatrixXd pred = rolling_forecast(res.checkpoint, y, sp.test_begin(), sp.total());
  if (scaler) pred = scaler->inverse(pred);
  rec.test = metrics(pred, data.values.middleRows(static_cast<Eigen::Index>(sp.test_begin()),
                                                  static_cast<Eigen::Index>(sp.n_test)));
  rec.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

std::size_t default_workers() {
  if (const char* env = std::getenv("LMRNN_WORKERS")) {
    char* endp = nullptr;
    const long v = std::strtol(env, &endp, 10);
    if (endp != env && *endp == '\0' && v > 0) return static_cast<std::size_t>(v);
    throw ConfigError(std::string("LMRNN_WORKERS must be a positive integer, got '") + env + "'");
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

ExperimentSummary summarize(const std::vector<RunRecord>& runs) {
  std::vector<double> rmse;
  std::vector<double> mae;
  std::vector<double> mape;
  ExperimentSummary s;
  s.runs = runs.size();
  for (const auto& r : runs) {
    if (r.failed) {
      ++s.failed;
      continue;
    }
    rmse.push_back(r.test.rmse);
    mae.push_back(r.test.mae);
    if (r.test.mape) mape.push_back(*r.test.mape);
  }
  s.rmse = summarize_values(rmse);
  s.mae = summarize_values(mae);
  s.mape = summarize_values(mape);
  return s;
}

ExperimentResult multi_seed_experiment(const TrainConfig& config, const TimeSeries& data,
                                       const std::vector<std::uint64_t>& seeds,
                                       std::size_t workers) {
  if (seeds.size() < 2) throw ConfigError("multi_seed_experiment needs at least two seeds");
  check_split(data);
  config.rule.validate();
  if (workers == 0) workers = default_workers();
  workers = std::min(workers, seeds.size());

  ExperimentResult out;
  out.runs.resize(seeds.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        out.runs[i] = train(config, data, seeds[i]).record;
      } catch (const DivergenceError& e) {
        RunRecord r;
        r.seed = seeds[i];
        r.config_digest = config.config_digest;
        r.kind = config.kind;
        r.failed = true;
        r.error = e.what();
        out.runs[i] = std::move(r);
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        try {
          work();
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          next = seeds.size();
        }
      });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }
  out.summary = summarize(out.runs);
  if (out.summary.failed == out.summary.runs) {
    throw ExperimentError("all " + std::to_string(seeds.size()) + " runs diverged");
  }
  return out;
}

}  // namespace lmrnn
