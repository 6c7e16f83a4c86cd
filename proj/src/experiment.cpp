#include "lmrnn/experiment.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lmrnn/errors.hpp"
#include "lmrnn/series_io.hpp"

namespace lmrnn {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

std::string read_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open '" + path.string() + "' for writing");
  os << text << '\n';
  if (!os) throw DataError("write to '" + path.string() + "' failed");
}

ojson matrix_json(const Eigen::MatrixXd& m) {
  std::vector<double> data;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& name) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (rows < 0 || cols < 0 || static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw ShapeError("tensor " + name + ": data length does not match rows*cols");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[static_cast<std::size_t>(r * cols + c)];
  }
  return m;
}

ProcessSpec process_from(const json& j) {
  ProcessSpec s;
  if (j.contains("preset")) {
    if (j.at("preset").get<std::string>() != "rnn-process") {
      throw ConfigError("unknown process preset '" + j.at("preset").get<std::string>() + "'");
    }
    s = rnn_process_preset();
  }
  if (j.contains("kind")) s.kind = parse_process_kind(j.at("kind").get<std::string>());
  read_if(j, "p", s.p);
  read_if(j, "q", s.q);
  if (j.contains("activation")) s.activation = parse_activation(j.at("activation").get<std::string>());
  if (j.contains("output_function")) {
    s.output_function = parse_activation(j.at("output_function").get<std::string>());
  }
  read_if(j, "noise_std", s.noise_std);
  if (j.contains("tensors")) {
    s.tensors.clear();
    for (const auto& [name, tj] : j.at("tensors").items()) {
      s.tensors.emplace(name, matrix_from_json(tj, name));
    }
  }
  s.validate();
  return s;
}

ojson process_json(const ProcessSpec& s) {
  ojson j;
  j["format"] = "lmrnn.process";
  j["version"] = 1;
  j["kind"] = to_string(s.kind);
  j["p"] = s.p;
  j["q"] = s.q;
  j["activation"] = std::string(to_string(s.activation));
  j["output_function"] = std::string(to_string(s.output_function));
  j["noise_std"] = s.noise_std;
  ojson t = ojson::object();
  for (const auto& [name, m] : s.tensors) t[name] = matrix_json(m);
  j["tensors"] = std::move(t);
  return j;
}

DatasetSpec dataset_from(const json& j) {
  DatasetSpec d;
  if (j.contains("preset")) d = preset_dataset(j.at("preset").get<std::string>());
  if (j.contains("type")) {
    const auto type = j.at("type").get<std::string>();
    if (type == "arfima") {
      d.source = DatasetSpec::Source::kArfima;
    } else if (type == "network-process") {
      d.source = DatasetSpec::Source::kNetworkProcess;
    } else if (type == "csv") {
      d.source = DatasetSpec::Source::kCsv;
    } else {
      throw ConfigError("unknown dataset type '" + type + "'");
    }
  }
  read_if(j, "n", d.n);
  read_if(j, "seed", d.seed);
  switch (d.source) {
    case DatasetSpec::Source::kArfima:
      read_if(j, "ar", d.arfima.ar);
      read_if(j, "ma", d.arfima.ma);
      read_if(j, "d", d.arfima.d);
      read_if(j, "noise_std", d.arfima.noise_std);
      read_if(j, "burn_in", d.arfima.burn_in);
      read_if(j, "truncation", d.arfima.truncation);
      break;
    case DatasetSpec::Source::kNetworkProcess:
      if (j.contains("process")) d.process = process_from(j.at("process"));
      if (j.contains("noise_std")) d.process.noise_std = j.at("noise_std").get<double>();
      break;
    case DatasetSpec::Source::kCsv:
      if (!j.contains("path")) throw ConfigError("csv dataset needs a 'path'");
      d.csv = j.at("path").get<std::string>();
      break;
  }
  return d;
}

ojson dataset_json(const DatasetSpec& d) {
  ojson j;
  switch (d.source) {
    case DatasetSpec::Source::kArfima:
      j["type"] = "arfima";
      j["ar"] = d.arfima.ar;
      j["ma"] = d.arfima.ma;
      j["d"] = d.arfima.d;
      j["noise_std"] = d.arfima.noise_std;
      j["burn_in"] = d.arfima.burn_in;
      j["truncation"] = d.arfima.truncation;
      j["n"] = d.n;
      j["seed"] = d.seed;
      break;
    case DatasetSpec::Source::kNetworkProcess:
      j["type"] = "network-process";
      j["process"] = process_json(d.process);
      j["n"] = d.n;
      j["seed"] = d.seed;
      break;
    case DatasetSpec::Source::kCsv:
      j["type"] = "csv";
      j["path"] = d.csv.string();
      j["content_fnv1a"] = hex16(fnv1a(read_file(d.csv)));
      break;
  }
  return j;
}

ojson metric_summary_json(const MetricSummary& m) {
  return {{"mean", m.mean}, {"std", m.std}, {"min", m.min}, {"count", m.count}};
}

ojson summary_json(const ExperimentSummary& s) {
  ojson j;
  j["runs"] = s.runs;
  j["failed"] = s.failed;
  j["rmse"] = metric_summary_json(s.rmse);
  j["mae"] = metric_summary_json(s.mae);
  j["mape"] = metric_summary_json(s.mape);
  return j;
}

ojson record_json(const RunRecord& r) {
  ojson j;
  j["format"] = "lmrnn.run_record";
  j["version"] = 1;
  j["seed"] = r.seed;
  j["config_digest"] = r.config_digest;
  j["kind"] = std::string(to_string(r.kind));
  j["failed"] = r.failed;
  j["error"] = r.error;
  j["steps"] = r.steps;
  j["best_step"] = r.best_step;
  j["stop_reason"] = std::string(to_string(r.stop_reason));
  j["train_loss"] = r.train_loss;
  j["val_loss"] = r.val_loss;
  ojson test;
  test["rmse"] = r.test.rmse;
  test["mae"] = r.test.mae;
  test["mape"] = r.test.mape ? ojson(*r.test.mape) : ojson(nullptr);
  test["mape_skipped"] = r.test.mape_skipped;
  j["test"] = std::move(test);
  j["wall_time_s"] = r.wall_time_s;
  return j;
}

ojson welch_json(const WelchResult& w) {
  return {{"t", w.t}, {"df", w.df}, {"p_one_sided", w.p_one_sided}};
}

}  // namespace

DatasetSpec preset_dataset(const std::string& name) {
  DatasetSpec d;
  d.n = 4001;
  d.seed = 1;
  if (name == "arfima-paper") {
    d.source = DatasetSpec::Source::kArfima;
    d.arfima = arfima_preset_spec();
  } else if (name == "rnn-process") {
    d.source = DatasetSpec::Source::kNetworkProcess;
    d.process = rnn_process_preset();
  } else {
    throw ConfigError("unknown dataset preset '" + name + "'");
  }
  return d;
}

DatasetSpec parse_dataset_spec(const std::string& json_text) {
  const json j = parse_json(json_text, "dataset document");
  try {
    return dataset_from(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("dataset document: ") + e.what());
  }
}

TimeSeries build_dataset(const DatasetSpec& spec) {
  switch (spec.source) {
    case DatasetSpec::Source::kArfima: return generate_arfima(spec.arfima, spec.n, spec.seed);
    case DatasetSpec::Source::kNetworkProcess:
      return generate_network_process(spec.process, spec.n, spec.seed);
    case DatasetSpec::Source::kCsv: return read_csv(spec.csv);
  }
  throw ConfigError("unknown dataset source");
}

ProcessSpec process_from_json(const std::string& json_text) {
  const json j = parse_json(json_text, "process document");
  try {
    return process_from(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("process document: ") + e.what());
  }
}

std::string process_to_json(const ProcessSpec& spec) { return process_json(spec).dump(2); }

ExperimentConfig preset_experiment(const std::string& name) {
  ExperimentConfig c;
  c.dataset = preset_dataset(name);
  c.split = {2000, 1200, 800};
  c.models = {{CellKind::kMrnnf, 8, kDefaultFilterLag}, {CellKind::kRnn, 8, kDefaultFilterLag}};
  const std::size_t count = name == "arfima-paper" ? 20 : 10;
  for (std::size_t s = 1; s <= count; ++s) c.seeds.push_back(s);
  return c;
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  const json j = parse_json(json_text, "experiment config");
  try {
    if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
    ExperimentConfig c;
    if (j.contains("preset")) c = preset_experiment(j.at("preset").get<std::string>());
    if (j.contains("dataset")) c.dataset = dataset_from(j.at("dataset"));
    if (j.contains("split")) {
      const auto& s = j.at("split");
      c.split = {s.at("n_train").get<std::size_t>(), s.at("n_val").get<std::size_t>(),
                 s.at("n_test").get<std::size_t>()};
    }
    if (j.contains("models")) {
      c.models.clear();
      for (const auto& m : j.at("models")) {
        ModelSpec ms;
        ms.kind = parse_cell_kind(m.at("kind").get<std::string>());
        read_if(m, "hidden", ms.hidden);
        read_if(m, "K", ms.K);
        c.models.push_back(ms);
      }
    }
    if (j.contains("stopping")) {
      const auto& s = j.at("stopping");
      read_if(s, "min_loss_drop", c.rule.min_loss_drop);
      read_if(s, "patience", c.rule.patience);
      read_if(s, "max_steps", c.rule.max_steps);
    }
    if (j.contains("adam")) {
      const auto& a = j.at("adam");
      read_if(a, "lr", c.adam.lr);
      read_if(a, "beta1", c.adam.beta1);
      read_if(a, "beta2", c.adam.beta2);
      read_if(a, "eps", c.adam.eps);
    }
    if (j.contains("seeds")) {
      const auto& s = j.at("seeds");
      c.seeds.clear();
      if (s.is_array()) {
        c.seeds = s.get<std::vector<std::uint64_t>>();
      } else {
        const auto start = s.value("start", std::uint64_t{1});
        const auto count = s.at("count").get<std::uint64_t>();
        for (std::uint64_t i = 0; i < count; ++i) c.seeds.push_back(start + i);
      }
    }
    read_if(j, "scale_inputs", c.scale_inputs);
    if (j.contains("out")) c.out = j.at("out").get<std::string>();

    if (c.models.empty()) throw ConfigError("experiment config lists no models");
    if (c.seeds.empty()) throw ConfigError("experiment config lists no seeds");
    for (const auto& m : c.models) {
      if (m.K == 0) throw ConfigError("model K must be at least 1");
      if (m.hidden == 0) throw ConfigError("model hidden size must be at least 1");
    }
    c.rule.validate();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
}

std::string canonical_config(const ExperimentConfig& c) {
  ojson j;
  j["format"] = "lmrnn.experiment";
  j["version"] = 1;
  j["dataset"] = dataset_json(c.dataset);
  j["split"] = {{"n_train", c.split.n_train}, {"n_val", c.split.n_val}, {"n_test", c.split.n_test}};
  ojson models = ojson::array();
  for (const auto& m : c.models) {
    models.push_back({{"kind", std::string(to_string(m.kind))}, {"hidden", m.hidden}, {"K", m.K}});
  }
  j["models"] = std::move(models);
  j["stopping"] = {{"min_loss_drop", c.rule.min_loss_drop},
                   {"patience", c.rule.patience},
                   {"max_steps", c.rule.max_steps}};
  j["adam"] = {{"lr", c.adam.lr}, {"beta1", c.adam.beta1}, {"beta2", c.adam.beta2},
               {"eps", c.adam.eps}};
  j["seeds"] = c.seeds;
  j["scale_inputs"] = c.scale_inputs;
  return j.dump(2);
}

std::string config_digest(const ExperimentConfig& c) { return hex16(fnv1a(canonical_config(c))); }

std::string run_record_to_json(const RunRecord& r) { return record_json(r).dump(2); }

std::string summary_to_json(const ExperimentSummary& s) { return summary_json(s).dump(2); }

std::string welch_to_json(const WelchResult& w, const std::string& metric, std::size_t n_a,
                          std::size_t n_b) {
  ojson j;
  j["format"] = "lmrnn.welch";
  j["version"] = 1;
  j["metric"] = metric;
  j["alternative"] = "mean(a) < mean(b)";
  j["n_a"] = n_a;
  j["n_b"] = n_b;
  j.update(welch_json(w));
  return j.dump(2);
}

void write_metrics_csv(const fs::path& path, const std::vector<RunRecord>& runs) {
  std::vector<std::vector<double>> cols(4);
  for (const auto& r : runs) {
    if (r.failed) continue;
    cols[0].push_back(static_cast<double>(r.seed));
    cols[1].push_back(r.test.rmse);
    cols[2].push_back(r.test.mae);
    cols[3].push_back(r.test.mape ? *r.test.mape : std::nan(""));
  }
  write_table(path, {"seed", "rmse", "mae", "mape"}, cols);
}

std::vector<double> read_metric_column(const fs::path& path, const std::string& metric) {
  const TimeSeries t = read_csv(path);
  for (std::size_t c = 0; c < t.names.size(); ++c) {
    if (t.names[c] == metric) return t.column(c);
  }
  throw DataError("'" + path.string() + "' has no column '" + metric + "'");
}

ExperimentOutcome run_experiment(const ExperimentConfig& config, std::size_t workers) {
  ExperimentOutcome out;
  out.digest = config_digest(config);
  out.run_dir = config.out / out.digest;
  const fs::path done = out.run_dir / "summary.json";
  if (fs::exists(done)) {
    out.reused = true;
    return out;
  }
  if (fs::exists(out.run_dir) && !fs::is_empty(out.run_dir)) {
    throw ConfigError("run directory '" + out.run_dir.string() +
                      "' exists but is incomplete; remove it to rerun");
  }

  TimeSeries data = build_dataset(config.dataset);
  if (config.split.total() > data.length()) {
    throw ConfigError("split sizes sum to " + std::to_string(config.split.total()) +
                      " but the dataset has " + std::to_string(data.length()) + " rows");
  }
  data.split = config.split;

  fs::create_directories(out.run_dir);
  write_file(out.run_dir / "config.json", canonical_config(config));
  write_csv(out.run_dir / "data.csv", data);

  ojson top;
  top["format"] = "lmrnn.experiment_summary";
  top["version"] = 1;
  top["digest"] = out.digest;
  ojson model_list = ojson::array();
  for (const auto& m : config.models) {
    TrainConfig tc;
    tc.kind = m.kind;
    tc.hidden = m.hidden;
    tc.K = m.K;
    tc.adam = config.adam;
    tc.rule = config.rule;
    tc.scale_inputs = config.scale_inputs;
    tc.config_digest = out.digest;
    ModelOutcome mo{m, multi_seed_experiment(tc, data, config.seeds, workers)};

    const std::string kind(to_string(m.kind));
    const fs::path dir = out.run_dir / kind;
    fs::create_directories(dir);
    ojson runs;
    runs["format"] = "lmrnn.runs";
    runs["version"] = 1;
    runs["config_digest"] = out.digest;
    runs["kind"] = kind;
    runs["runs"] = ojson::array();
    for (const auto& r : mo.result.runs) runs["runs"].push_back(record_json(r));
    write_file(dir / "runs.json", runs.dump(2));
    write_file(dir / "summary.json", summary_json(mo.result.summary).dump(2));
    write_metrics_csv(dir / "metrics.csv", mo.result.runs);
    model_list.push_back({{"kind", kind},
                          {"hidden", m.hidden},
                          {"K", m.K},
                          {"summary", summary_json(mo.result.summary)}});
    out.models.push_back(std::move(mo));
  }

  ojson comparisons = ojson::array();
  if (out.models.size() > 1) {
    auto rmse_of = [](const ExperimentResult& r) {
      std::vector<double> v;
      for (const auto& run : r.runs) {
        if (!run.failed) v.push_back(run.test.rmse);
      }
      return v;
    };
    const auto a = rmse_of(out.models[0].result);
    for (std::size_t i = 1; i < out.models.size(); ++i) {
      ojson c;
      c["model"] = std::string(to_string(out.models[0].model.kind));
      c["benchmark"] = std::string(to_string(out.models[i].model.kind));
      c["metric"] = "rmse";
      try {
        c.update(welch_json(welch_ttest(a, rmse_of(out.models[i].result))));
      } catch (const StatisticsError& e) {
        c["error"] = e.what();
      }
      comparisons.push_back(std::move(c));
    }
  }
  ojson cmp;
  cmp["format"] = "lmrnn.comparisons";
  cmp["version"] = 1;
  cmp["comparisons"] = std::move(comparisons);
  write_file(out.run_dir / "comparisons.json", cmp.dump(2));
  top["models"] = std::move(model_list);
  write_file(done, top.dump(2));
  return out;
}

}  // namespace lmrnn
