#include "lmrnn/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lmrnn/diagnostics.hpp"
#include "lmrnn/ergodicity.hpp"
#include "lmrnn/errors.hpp"
#include "lmrnn/experiment.hpp"
#include "lmrnn/impulse.hpp"
#include "lmrnn/series_io.hpp"

namespace lmrnn {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

std::string slurp(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text << '\n';
    return;
  }
  const fs::path p(out_path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  if (!os) throw DataError("cannot open '" + out_path + "' for writing");
  os << text << '\n';
}

ojson decay_json(const DecayClass& d) {
  return {{"kind", std::string(to_string(d.kind))},
          {"rate", d.rate},
          {"r2_exponential", d.r2_exponential},
          {"r2_polynomial", d.r2_polynomial},
          {"log_slope", d.log_slope},
          {"loglog_slope", d.loglog_slope},
          {"used_points", d.used_points},
          {"excluded_zeros", d.excluded_zeros}};
}

struct GenerateOpts {
  std::string preset;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n;
  std::string out;
};

int cmd_generate(const GenerateOpts& o, std::ostream& out) {
  if (o.preset.empty() == o.config.empty()) {
    throw ConfigError("generate: give exactly one of --preset or --config");
  }
  DatasetSpec spec = o.preset.empty() ? parse_dataset_spec(slurp(o.config)) : preset_dataset(o.preset);
  if (o.seed) spec.seed = *o.seed;
  if (o.n) spec.n = *o.n;
  if (spec.source == DatasetSpec::Source::kCsv) throw ConfigError("generate: csv is not a generator");
  const TimeSeries series = build_dataset(spec);
  if (o.out.empty()) {
    write_csv(out, series);
  } else {
    const fs::path p(o.out);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    write_csv(p, series);
  }
  return 0;
}

struct DiagnoseOpts {
  std::string input;
  std::size_t max_lag = 200;
  std::string out;
};

int cmd_diagnose(const DiagnoseOpts& o, std::ostream& out) {
  const TimeSeries series = read_csv(fs::path(o.input));
  const std::size_t n = series.length();
  if (n < 16) {
    throw InsufficientDataError("diagnose: need at least 16 rows, got " + std::to_string(n));
  }
  const std::size_t L = std::min(o.max_lag, n - 1);
  ojson report;
  report["format"] = "lmrnn.diagnosis";
  report["version"] = 1;
  report["n"] = n;
  report["max_lag"] = L;
  report["columns"] = ojson::array();
  if (!o.out.empty()) fs::create_directories(o.out);
  for (std::size_t c = 0; c < series.dims(); ++c) {
    const auto x = series.column(c);
    const AcfResult a = acf(x, L);
    const SpectrumResult s = periodogram(x);
    const MemoryClass mem = classify_memory(x);
    ojson col;
    col["name"] = series.names[c];
    col["memory"] = {{"label", std::string(to_string(mem.kind))},
                     {"d_hat", mem.d_hat},
                     {"d_se", mem.d_se},
                     {"frequencies_used", mem.frequencies_used}};
    col["acf"] = std::vector<double>(a.autocorrelation.begin() + 1, a.autocorrelation.end());
    try {
      col["acf_decay"] = decay_json(classify_decay(a.autocorrelation));
    } catch (const InsufficientDataError&) {
      col["acf_decay"] = nullptr;
    }
    const std::size_t count = std::min<std::size_t>(50, s.ordinates.size());
    const LineFit pf = periodogram_loglog_slope(s, count);
    col["periodogram_loglog"] = {{"count", count}, {"slope", pf.slope}, {"r2", pf.r2}};
    col["variance"] = a.autocovariance[0];
    report["columns"].push_back(std::move(col));

    if (!o.out.empty()) {
      const std::string stem = series.dims() == 1 ? "" : "_" + series.names[c];
      std::vector<double> lags;
      for (std::size_t k = 1; k <= L; ++k) lags.push_back(static_cast<double>(k));
      write_table(fs::path(o.out) / ("acf" + stem + ".csv"), {"lag", "autocorrelation"},
                  {lags, std::vector<double>(a.autocorrelation.begin() + 1, a.autocorrelation.end())});
      write_table(fs::path(o.out) / ("periodogram" + stem + ".csv"), {"frequency", "ordinate"},
                  {s.frequencies, s.ordinates});
    }
  }
  emit(report.dump(2), o.out.empty() ? "" : (fs::path(o.out) / "report.json").string(), out);
  return 0;
}

struct CheckOpts {
  std::string config;
  double a = kDefaultContraction;
  std::string out;
};

int cmd_check(const CheckOpts& o, std::ostream& out) {
  const std::string text = slurp(o.config);
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ConfigError("check: '" + o.config + "' is not JSON");
  const std::string format = j.value("format", std::string());
  Verdict v;
  if (format == "lmrnn.process") {
    const ProcessSpec p = process_from_json(text);
    if (p.kind != ProcessKind::kLinearMc) {
      throw ConfigError("check: process documents are supported for linear-mc only");
    }
    v = check_linear_mc(p.tensors.at("W"));
  } else {
    const CellParams params = params_from_json(text);
    if (params.kind == CellKind::kRnn) {
      v = check_rnn_ergodicity(params, o.a);
    } else if (params.kind == CellKind::kLstm) {
      v = check_lstm_ergodicity(params, o.a);
    } else {
      throw ConfigError("check: supported kinds are rnn and lstm, got " +
                        std::string(to_string(params.kind)));
    }
  }
  emit(verdict_to_json(v), o.out, out);
  return 0;
}

struct ImpulseOpts {
  std::string config;
  std::size_t lags = 200;
  std::size_t tail_start = kDefaultTailStart;
  std::string out;
};

int cmd_impulse(const ImpulseOpts& o, std::ostream& out) {
  const CellParams params = params_from_json(slurp(o.config));
  const auto A = impulse_response(params, o.lags);
  const Eigen::Index rows = A.front().rows();
  const Eigen::Index cols = A.front().cols();
  std::vector<std::string> header{"k"};
  std::vector<std::vector<double>> columns(1);
  for (std::size_t k = 0; k < A.size(); ++k) columns[0].push_back(static_cast<double>(k));
  ojson decay = ojson::array();
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index jj = 0; jj < cols; ++jj) {
      const std::string name = "a_" + std::to_string(i) + "_" + std::to_string(jj);
      header.push_back(name);
      columns.push_back(impulse_entry(A, i, jj));
      ojson entry{{"entry", name}};
      try {
        entry["decay"] = decay_json(classify_decay(columns.back(), o.tail_start));
      } catch (const InsufficientDataError& e) {
        entry["decay"] = nullptr;
        entry["error"] = e.what();
      }
      decay.push_back(std::move(entry));
    }
  }
  ojson report;
  report["format"] = "lmrnn.impulse";
  report["version"] = 1;
  report["kind"] = std::string(to_string(params.kind));
  report["lags"] = o.lags;
  report["tail_start"] = o.tail_start;
  report["entries"] = std::move(decay);
  if (o.out.empty()) {
    out << report.dump(2) << '\n';
  } else {
    fs::create_directories(o.out);
    write_table(fs::path(o.out) / "impulse.csv", header, columns);
    emit(report.dump(2), (fs::path(o.out) / "decay.json").string(), out);
  }
  return 0;
}

struct ExperimentOpts {
  std::string config;
  std::string preset;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool scale_inputs = false;
};

int cmd_experiment(const ExperimentOpts& o, std::ostream& out) {
  if (o.preset.empty() == o.config.empty()) {
    throw ConfigError("experiment: give exactly one of --preset or --config");
  }
  ExperimentConfig cfg =
      o.preset.empty() ? parse_experiment_config(slurp(o.config)) : preset_experiment(o.preset);
  if (!o.out.empty()) cfg.out = o.out;
  if (o.seed) cfg.dataset.seed = *o.seed;
  if (o.scale_inputs) cfg.scale_inputs = true;
  const ExperimentOutcome res = run_experiment(cfg);
  ojson j;
  j["run_dir"] = res.run_dir.string();
  j["digest"] = res.digest;
  j["reused"] = res.reused;
  out << j.dump(2) << '\n';
  return 0;
}

struct CompareOpts {
  std::string a;
  std::string b;
  std::string metric = "rmse";
  std::string out;
};

int cmd_compare(const CompareOpts& o, std::ostream& out) {
  const auto a = read_metric_column(o.a, o.metric);
  const auto b = read_metric_column(o.b, o.metric);
  emit(welch_to_json(welch_ttest(a, b), o.metric, a.size(), b.size()), o.out, out);
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Long-memory recurrent networks: data, diagnostics and experiments", "lmrnn"};
  app.require_subcommand(1);

  GenerateOpts gen;
  auto* g = app.add_subcommand("generate", "Write a synthetic series as CSV");
  g->add_option("--preset", gen.preset, "arfima-paper or rnn-process");
  g->add_option("--config", gen.config, "Generator JSON document");
  g->add_option("--seed", gen.seed, "Noise seed");
  g->add_option("--n", gen.n, "Series length");
  g->add_option("--out", gen.out, "Output CSV (default stdout)");

  DiagnoseOpts diag;
  auto* d = app.add_subcommand("diagnose", "ACF, periodogram and memory classification");
  d->add_option("input", diag.input, "Series CSV")->required();
  d->add_option("--max-lag", diag.max_lag, "Largest ACF lag");
  d->add_option("--out", diag.out, "Directory for report.json and plot CSVs");

  CheckOpts chk;
  auto* c = app.add_subcommand("check", "Ergodicity conditions for a checkpoint");
  c->add_option("--config", chk.config, "Cell parameter or process JSON")->required();
  c->add_option("--a", chk.a, "Contraction constant in (0, 1)");
  c->add_option("--out", chk.out, "Output JSON (default stdout)");

  ImpulseOpts imp;
  auto* i = app.add_subcommand("impulse", "Impulse response of a linearised cell");
  i->add_option("--config", imp.config, "Cell parameter JSON")->required();
  i->add_option("--lags", imp.lags, "Largest lag k");
  i->add_option("--tail-start", imp.tail_start, "First lag used by the decay fit");
  i->add_option("--out", imp.out, "Directory for impulse.csv and decay.json");

  ExperimentOpts exp;
  auto* e = app.add_subcommand("experiment", "Multi-seed training experiment");
  e->add_option("--config", exp.config, "Experiment JSON");
  e->add_option("--preset", exp.preset, "arfima-paper or rnn-process");
  e->add_option("--out", exp.out, "Parent directory of the run directory");
  e->add_option("--seed", exp.seed, "Dataset seed");
  e->add_flag("--scale-inputs", exp.scale_inputs, "Scale the series to [-1, 1]");

  CompareOpts cmp;
  auto* m = app.add_subcommand("compare", "Welch t-test on two per-seed metric tables");
  m->add_option("a", cmp.a, "Metric CSV of the model")->required();
  m->add_option("b", cmp.b, "Metric CSV of the benchmark")->required();
  m->add_option("--metric", cmp.metric, "rmse, mae or mape");
  m->add_option("--out", cmp.out, "Output JSON (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& pe) {
    const int code = app.exit(pe, out, err);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*g) return cmd_generate(gen, out);
    if (*d) return cmd_diagnose(diag, out);
    if (*c) return cmd_check(chk, out);
    if (*i) return cmd_impulse(imp, out);
    if (*e) return cmd_experiment(exp, out);
    if (*m) return cmd_compare(cmp, out);
  } catch (const ConfigError& ex) {
    err << "lmrnn: config error: " << ex.what() << '\n';
    return kExitConfig;
  } catch (const ShapeError& ex) {
    err << "lmrnn: config error: " << ex.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& ex) {
    err << "lmrnn: config error: " << ex.what() << '\n';
    return kExitConfig;
  } catch (const ContractError& ex) {
    err << "lmrnn: config error: " << ex.what() << '\n';
    return kExitConfig;
  } catch (const DataError& ex) {
    err << "lmrnn: data error: " << ex.what() << '\n';
    return kExitData;
  } catch (const StatisticsError& ex) {
    err << "lmrnn: data error: " << ex.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& ex) {
    err << "lmrnn: data error: " << ex.what() << '\n';
    return kExitData;
  } catch (const DivergenceError& ex) {
    err << "lmrnn: numerical failure: " << ex.what() << '\n';
    return kExitNumerical;
  } catch (const ExperimentError& ex) {
    err << "lmrnn: numerical failure: " << ex.what() << '\n';
    return kExitNumerical;
  }
  return kExitConfig;
}

}  // namespace lmrnn
