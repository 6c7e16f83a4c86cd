#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "lmrnn/cli.hpp"
#include "lmrnn/experiment.hpp"
#include "lmrnn/networks.hpp"
#include "lmrnn/procgen.hpp"
#include "lmrnn/series_io.hpp"

using namespace lmrnn;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::initializer_list<std::string> args) {
  std::vector<std::string> store{"lmrnn"};
  store.insert(store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : store) argv.push_back(s.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path tmp(const std::string& name) {
  const fs::path root(LMRNN_TEST_TMP);
  fs::create_directories(root);
  const fs::path p = root / name;
  fs::remove_all(p);
  return p;
}

void write_text(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

json read_json(const fs::path& p) {
  std::ifstream is(p);
  return json::parse(is);
}

}  // namespace

TEST_CASE("generate writes the preset series") {
  const auto out = tmp("gen") / "series.csv";
  const auto r = cli({"generate", "--preset", "arfima-paper", "--seed", "3", "--out", out.string()});
  REQUIRE(r.code == 0);
  const auto ts = read_csv(out);
  CHECK(ts.length() == 4001);
  const auto direct = generate_arfima(arfima_preset_spec(), 4001, 3);
  CHECK((ts.values - direct.values).cwiseAbs().maxCoeff() < 1e-12);

  const auto s = cli({"generate", "--preset", "rnn-process", "--n", "50"});
  REQUIRE(s.code == 0);
  std::istringstream is(s.out);
  CHECK(read_csv(is).length() == 50);
}

TEST_CASE("generate argument errors") {
  CHECK(cli({"generate"}).code == 2);
  CHECK(cli({"generate", "--preset", "nope"}).code == 2);
  CHECK(cli({"generate", "--preset", "arfima-paper", "--config", "x.json"}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"generate", "--config", "/nonexistent/x.json"}).code == 3);
}

TEST_CASE("diagnose reports memory and writes plot tables") {
  const auto dir = tmp("diag");
  const auto csv = dir / "y.csv";
  REQUIRE(cli({"generate", "--preset", "arfima-paper", "--out", csv.string()}).code == 0);
  const auto r = cli({"diagnose", csv.string(), "--max-lag", "50", "--out", (dir / "rep").string()});
  REQUIRE(r.code == 0);
  const auto rep = read_json(dir / "rep" / "report.json");
  CHECK(rep["format"] == "lmrnn.diagnosis");
  CHECK(rep["n"] == 4001);
  CHECK(rep["columns"][0]["acf"].size() == 50);
  CHECK(rep["columns"][0]["memory"]["label"] == "long-memory");
  CHECK(fs::exists(dir / "rep" / "acf.csv"));
  CHECK(fs::exists(dir / "rep" / "periodogram.csv"));

  const auto s = cli({"diagnose", csv.string(), "--max-lag", "10"});
  REQUIRE(s.code == 0);
  CHECK(json::parse(s.out)["max_lag"] == 10);
}

TEST_CASE("diagnose data errors") {
  const auto dir = tmp("diag_err");
  write_text(dir / "short.csv", "y\n1\n2\n3\n");
  CHECK(cli({"diagnose", (dir / "short.csv").string()}).code == 3);
  write_text(dir / "bad.csv", "y\n1\nabc\n3\n");
  CHECK(cli({"diagnose", (dir / "bad.csv").string()}).code == 3);
  CHECK(cli({"diagnose", (dir / "missing.csv").string()}).code == 3);
  std::string flat = "y\n";
  for (int i = 0; i < 40; ++i) flat += "1.5\n";
  write_text(dir / "flat.csv", flat);
  CHECK(cli({"diagnose", (dir / "flat.csv").string()}).code == 3);
}

TEST_CASE("check runs the ergodicity rules") {
  const auto dir = tmp("check");
  CellParams p = init_params(CellKind::kLstm, {1, 1, 1}, 1, 0, InitScheme::kZero);
  write_text(dir / "lstm.json", params_to_json(p));
  auto r = cli({"check", "--config", (dir / "lstm.json").string(), "--a", "0.6"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["conclusion"] == "short-memory-proven");
  r = cli({"check", "--config", (dir / "lstm.json").string(), "--a", "0.4"});
  CHECK(json::parse(r.out)["conclusion"] == "inconclusive");
  CHECK(cli({"check", "--config", (dir / "lstm.json").string(), "--a", "1.5"}).code == 2);

  ProcessSpec mc;
  mc.kind = ProcessKind::kLinearMc;
  mc.tensors["W"] = Eigen::MatrixXd::Identity(2, 2) * 1.1;
  write_text(dir / "mc.json", process_to_json(mc));
  r = cli({"check", "--config", (dir / "mc.json").string(), "--out", (dir / "v.json").string()});
  REQUIRE(r.code == 0);
  CHECK(read_json(dir / "v.json")["conclusion"] == "not-geometrically-ergodic");

  write_text(dir / "mrnn.json", params_to_json(init_params(CellKind::kMrnn, {1, 2, 1}, 3, 1)));
  CHECK(cli({"check", "--config", (dir / "mrnn.json").string()}).code == 2);
  write_text(dir / "junk.json", "[1, 2");
  CHECK(cli({"check", "--config", (dir / "junk.json").string()}).code == 2);
}

TEST_CASE("impulse writes the response table") {
  const auto dir = tmp("impulse");
  CellParams p = init_params(CellKind::kRnn, {1, 1, 1}, 1, 0, InitScheme::kZero);
  p.hidden_activation = Activation::kIdentity;
  p.at("W_hh")(0, 0) = 0.5;
  p.at("W_hx")(0, 0) = 1.0;
  p.at("W_zh")(0, 0) = 1.0;
  write_text(dir / "rnn.json", params_to_json(p));
  const auto r = cli({"impulse", "--config", (dir / "rnn.json").string(), "--lags", "60",
                      "--tail-start", "1", "--out", (dir / "o").string()});
  REQUIRE(r.code == 0);
  const auto rep = read_json(dir / "o" / "decay.json");
  CHECK(rep["entries"][0]["decay"]["kind"] == "exponential");
  CHECK(rep["entries"][0]["decay"]["rate"].get<double>() == doctest::Approx(0.5).epsilon(1e-6));
  std::ifstream is(dir / "o" / "impulse.csv");
  const auto table = read_csv(is);
  CHECK(table.length() == 61);
  CHECK(table.values(3, 1) == doctest::Approx(0.125));

  write_text(dir / "lstm.json", params_to_json(init_params(CellKind::kLstm, {1, 1, 1}, 1, 1)));
  CHECK(cli({"impulse", "--config", (dir / "lstm.json").string()}).code == 2);
  CHECK(cli({"impulse", "--config", (dir / "rnn.json").string(), "--lags", "0"}).code == 2);
}

TEST_CASE("experiment runs, reuses its directory and feeds compare") {
  const auto dir = tmp("exp");
  const json cfg = {
      {"dataset", {{"type", "arfima"}, {"ar", {0.5}}, {"ma", json::array()}, {"d", 0.3},
                   {"n", 400}, {"seed", 2}}},
      {"split", {{"n_train", 250}, {"n_val", 80}, {"n_test", 70}}},
      {"models", {{{"kind", "mrnnf"}, {"hidden", 3}, {"K", 20}}, {{"kind", "rnn"}, {"hidden", 3}}}},
      {"stopping", {{"max_steps", 10}}},
      {"seeds", {{"start", 1}, {"count", 3}}},
      {"out", (dir / "runs").string()}};
  write_text(dir / "cfg.json", cfg.dump());
  const auto a = cli({"experiment", "--config", (dir / "cfg.json").string()});
  REQUIRE(a.code == 0);
  const auto ja = json::parse(a.out);
  CHECK(ja["reused"] == false);
  const fs::path run_dir = ja["run_dir"].get<std::string>();
  CHECK(fs::exists(run_dir / "summary.json"));
  CHECK(fs::exists(run_dir / "comparisons.json"));
  CHECK(read_json(run_dir / "mrnnf" / "runs.json")["runs"].size() == 3);

  const auto b = cli({"experiment", "--config", (dir / "cfg.json").string()});
  REQUIRE(b.code == 0);
  const auto jb = json::parse(b.out);
  CHECK(jb["reused"] == true);
  CHECK(jb["digest"] == ja["digest"]);

  const auto c = cli({"experiment", "--config", (dir / "cfg.json").string(), "--seed", "9"});
  REQUIRE(c.code == 0);
  CHECK(json::parse(c.out)["digest"] != ja["digest"]);

  const auto m = cli({"compare", (run_dir / "mrnnf" / "metrics.csv").string(),
                      (run_dir / "rnn" / "metrics.csv").string(), "--metric", "mae"});
  REQUIRE(m.code == 0);
  const auto w = json::parse(m.out);
  CHECK(w["format"] == "lmrnn.welch");
  CHECK(w["n_a"] == 3);
  const auto self = cli({"compare", (run_dir / "rnn" / "metrics.csv").string(),
                         (run_dir / "rnn" / "metrics.csv").string()});
  CHECK(json::parse(self.out)["p_one_sided"].get<double>() == doctest::Approx(0.5));
}

TEST_CASE("experiment and compare errors") {
  const auto dir = tmp("exp_err");
  write_text(dir / "bad.json", R"({"split": {"n_train": 10}})");
  CHECK(cli({"experiment", "--config", (dir / "bad.json").string()}).code == 2);
  CHECK(cli({"experiment"}).code == 2);
  write_text(dir / "one.json", R"({"preset": "arfima-paper", "seeds": [1]})");
  CHECK(cli({"experiment", "--config", (dir / "one.json").string(), "--out", dir.string()}).code == 2);
  write_text(dir / "m.csv", "seed,rmse,mae,mape\n1,1.0,1.0,1.0\n");
  CHECK(cli({"compare", (dir / "m.csv").string(), (dir / "m.csv").string()}).code == 3);
  CHECK(cli({"compare", (dir / "m.csv").string(), (dir / "m.csv").string(), "--metric", "r2"}).code == 3);
}

TEST_CASE("CSV round trip") {
  TimeSeries ts;
  ts.values = Eigen::MatrixXd(3, 2);
  ts.values << 0.1, -2.5, 1e-17, 3.0, 12345.678901234567, -0.0;
  ts.names = {"a", "b"};
  std::stringstream ss;
  write_csv(ss, ts);
  const auto back = read_csv(ss);
  CHECK(back.names == ts.names);
  CHECK(back.values == ts.values);
}
