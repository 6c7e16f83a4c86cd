#pragma once

// Experiment configuration documents, dataset construction and result
// persistence shared by the command-line tool and the Python module.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lmrnn/procgen.hpp"
#include "lmrnn/training.hpp"
#include "lmrnn/types.hpp"

namespace lmrnn {

/// Dataset source: a generator or a CSV file.
struct DatasetSpec {
  enum class Source { kArfima, kNetworkProcess, kCsv };
  Source source = Source::kArfima;
  ArfimaSpec arfima;
  ProcessSpec process;
  std::filesystem::path csv;
  std::size_t n = 4001;
  std::uint64_t seed = 1;
};

struct ModelSpec {
  CellKind kind = CellKind::kMrnnf;
  std::size_t hidden = 8;
  std::size_t K = kDefaultFilterLag;
};

struct ExperimentConfig {
  DatasetSpec dataset;
  Split split{2000, 1200, 800};
  std::vector<ModelSpec> models;
  StoppingRule rule;
  AdamConfig adam;
  std::vector<std::uint64_t> seeds;
  bool scale_inputs = false;
  std::filesystem::path out = "runs";
};

/// Parses an experiment document. A "preset" key ("arfima-paper" or
/// "rnn-process") supplies defaults that explicit keys override. Throws
/// ConfigError on malformed documents.
[[nodiscard]] ExperimentConfig parse_experiment_config(const std::string& json_text);
[[nodiscard]] ExperimentConfig preset_experiment(const std::string& name);

/// Canonical JSON of everything that determines results (output path excluded).
[[nodiscard]] std::string canonical_config(const ExperimentConfig& config);
/// 16 hex digits of FNV-1a 64 over canonical_config.
[[nodiscard]] std::string config_digest(const ExperimentConfig& config);

/// Parses a generator document, e.g. {"type": "arfima", "d": 0.4, ...},
/// {"type": "network-process", ...} or {"preset": "arfima-paper"}.
[[nodiscard]] DatasetSpec parse_dataset_spec(const std::string& json_text);
[[nodiscard]] DatasetSpec preset_dataset(const std::string& name);
[[nodiscard]] TimeSeries build_dataset(const DatasetSpec& spec);

[[nodiscard]] ProcessSpec process_from_json(const std::string& json_text);
[[nodiscard]] std::string process_to_json(const ProcessSpec& spec);

[[nodiscard]] std::string run_record_to_json(const RunRecord& r);
[[nodiscard]] std::string summary_to_json(const ExperimentSummary& s);
[[nodiscard]] std::string welch_to_json(const WelchResult& w, const std::string& metric,
                                        std::size_t n_a, std::size_t n_b);

struct ModelOutcome {
  ModelSpec model;
  ExperimentResult result;
};

struct ExperimentOutcome {
  std::filesystem::path run_dir;
  std::string digest;
  bool reused = false;
  std::vector<ModelOutcome> models;  // empty when reused
};

/// Runs every model over the configured seeds and writes
///   <out>/<digest>/config.json
///   <out>/<digest>/<kind>/runs.json, summary.json, metrics.csv
///   <out>/<digest>/summary.json (written last, marks completion)
///   <out>/<digest>/comparisons.json (first model against each other model)
/// A completed directory with the same digest is reused without rerunning;
/// an incomplete one is refused with ConfigError.
[[nodiscard]] ExperimentOutcome run_experiment(const ExperimentConfig& config,
                                               std::size_t workers = 0);

/// Per-seed metric table (columns seed, rmse, mae, mape) of one model.
void write_metrics_csv(const std::filesystem::path& path, const std::vector<RunRecord>& runs);
/// Reads one metric column of a table written by write_metrics_csv.
[[nodiscard]] std::vector<double> read_metric_column(const std::filesystem::path& path,
                                                     const std::string& metric);

}  // namespace lmrnn
