#pragma once

// Full-batch Adam training with early stopping and best-validation model
// selection, one-step rolling forecasts, error metrics and seeded
// multi-run experiments.
//
// Framing: the network reads x^t = y^{t-1} (x^1 = 0) and is trained to emit
// y^t, so output row t is a one-step forecast from the observed past.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lmrnn/networks.hpp"
#include "lmrnn/types.hpp"

namespace lmrnn {

struct AdamConfig {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig hyper;
  ParamMap m;
  ParamMap v;
  std::size_t step = 0;
};

/// Zero moments shaped like `params`.
[[nodiscard]] AdamState adam_init(const ParamMap& params, const AdamConfig& hyper = {});

/// One bias-corrected Adam update in place. Throws ShapeError unless params,
/// grads and the moments carry identical names and shapes.
void adam_update(ParamMap& params, const ParamMap& grads, AdamState& state);

struct AdamStepResult {
  CellParams params;
  AdamState state;
};
[[nodiscard]] AdamStepResult adam_step(const CellParams& params, const Gradients& grads,
                                       const AdamState& state);

/// Stop when the training loss rose for `patience` consecutive steps, when it
/// fell by less than `min_loss_drop` between consecutive steps, or after
/// `max_steps` optimizer steps.
struct StoppingRule {
  double min_loss_drop = 1e-5;
  std::size_t patience = 100;
  std::size_t max_steps = 1000;

  void validate() const;
};

enum class StopReason { kMaxSteps, kSmallDrop, kIncreasing };
[[nodiscard]] std::string_view to_string(StopReason r);

struct Metrics {
  double rmse = 0.0;
  double mae = 0.0;
  std::optional<double> mape;  // empty when every |target| < 1e-8
  std::size_t mape_skipped = 0;
};

inline constexpr double kMapeThreshold = 1e-8;

/// Throws ShapeError for incongruent or empty inputs.
[[nodiscard]] Metrics metrics(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target);

struct TrainConfig {
  CellKind kind = CellKind::kMrnnf;
  std::size_t hidden = 8;
  std::size_t K = kDefaultFilterLag;
  Activation hidden_activation = Activation::kTanh;
  Activation output_function = Activation::kIdentity;
  InitScheme init = InitScheme::kUniformFanIn;
  AdamConfig adam;
  StoppingRule rule;
  /// Affinely map the series so the training block spans [-1, 1]; forecasts
  /// are mapped back before metrics are computed.
  bool scale_inputs = false;
  std::string config_digest;
};

struct RunRecord {
  std::uint64_t seed = 0;
  std::string config_digest;
  CellKind kind = CellKind::kRnn;
  std::vector<double> train_loss;  // entry s: parameters after s steps
  std::vector<double> val_loss;
  std::size_t steps = 0;
  std::size_t best_step = 0;
  StopReason stop_reason = StopReason::kMaxSteps;
  Metrics test;
  double wall_time_s = 0.0;
  bool failed = false;
  std::string error;
};

struct TrainResult {
  RunRecord record;
  CellParams checkpoint;  // smallest validation loss
};

/// `data.split` must be set with non-empty blocks. Throws ConfigError for bad
/// splits and DivergenceError when a forward pass leaves the finite range.
[[nodiscard]] TrainResult train(const TrainConfig& config, const TimeSeries& data,
                                std::uint64_t seed);

/// Network inputs for a series: row t is y^{t-1}, row 0 is zero.
[[nodiscard]] Eigen::MatrixXd lagged_inputs(const Eigen::MatrixXd& y);

/// One-step forecasts for rows [begin, end) of `series` from the observed
/// history, no prediction feedback. Throws DomainError on a bad range.
[[nodiscard]] Eigen::MatrixXd rolling_forecast(const CellParams& checkpoint,
                                               const Eigen::MatrixXd& series, std::size_t begin,
                                               std::size_t end);

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1)
  double min = 0.0;
  std::size_t count = 0;
};

struct ExperimentSummary {
  MetricSummary rmse;
  MetricSummary mae;
  MetricSummary mape;
  std::size_t runs = 0;
  std::size_t failed = 0;
};

struct ExperimentResult {
  std::vector<RunRecord> runs;  // seed order
  ExperimentSummary summary;
};

/// Worker count from LMRNN_WORKERS, else the hardware concurrency.
[[nodiscard]] std::size_t default_workers();

/// Trains one model per seed on the same data. Runs may execute on
/// `workers` threads; results are merged in seed order. Diverged runs are
/// kept with failed = true and excluded from the summary. Throws ConfigError
/// for fewer than two seeds and ExperimentError when every run fails.
[[nodiscard]] ExperimentResult multi_seed_experiment(const TrainConfig& config,
                                                     const TimeSeries& data,
                                                     const std::vector<std::uint64_t>& seeds,
                                                     std::size_t workers = 0);

[[nodiscard]] ExperimentSummary summarize(const std::vector<RunRecord>& runs);

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p_one_sided = 0.0;  // H1: mean(a) < mean(b)
};

/// Welch statistic with Welch-Satterthwaite degrees of freedom; the p-value
/// is the Student-t CDF at t via the regularised incomplete beta function.
/// Throws StatisticsError when a sample has fewer than 2 values or both
/// variances vanish.
[[nodiscard]] WelchResult welch_ttest(std::span<const double> a, std::span<const double> b);

}  // namespace lmrnn
