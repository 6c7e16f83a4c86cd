#include <sstream>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lmrnn/cli.hpp"
#include "lmrnn/diagnostics.hpp"
#include "lmrnn/ergodicity.hpp"
#include "lmrnn/errors.hpp"
#include "lmrnn/experiment.hpp"
#include "lmrnn/fracdiff.hpp"
#include "lmrnn/impulse.hpp"
#include "lmrnn/networks.hpp"
#include "lmrnn/procgen.hpp"
#include "lmrnn/training.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

py::dict decay_dict(const lmrnn::DecayClass& d) {
  return py::dict("kind"_a = std::string(lmrnn::to_string(d.kind)), "rate"_a = d.rate,
                  "r2_exponential"_a = d.r2_exponential, "r2_polynomial"_a = d.r2_polynomial,
                  "used_points"_a = d.used_points, "excluded_zeros"_a = d.excluded_zeros);
}

// A_k stacked as (lags + 1, p_z * p_x), row-major within each k.
Eigen::MatrixXd impulse_table(const std::string& params_json, std::size_t lags) {
  const auto A = lmrnn::impulse_response(lmrnn::params_from_json(params_json), lags);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(A.size()), A.front().size());
  for (std::size_t k = 0; k < A.size(); ++k) {
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> r = A[k];
    out.row(static_cast<Eigen::Index>(k)) = Eigen::Map<const Eigen::RowVectorXd>(r.data(), r.size());
  }
  return out;
}

py::tuple run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"lmrnn"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  int code = 0;
  {
    py::gil_scoped_release release;
    code = lmrnn::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Core routines of the lmrnn library";

  py::register_exception<lmrnn::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<lmrnn::ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<lmrnn::DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<lmrnn::StatisticsError>(m, "StatisticsError", PyExc_ValueError);
  auto data = py::register_exception<lmrnn::DataError>(m, "DataError", PyExc_RuntimeError);
  py::register_exception<lmrnn::DegenerateSeriesError>(m, "DegenerateSeriesError", data.ptr());
  py::register_exception<lmrnn::InsufficientDataError>(m, "InsufficientDataError", data.ptr());
  py::register_exception<lmrnn::DivergenceError>(m, "DivergenceError", PyExc_ArithmeticError);
  py::register_exception<lmrnn::ExperimentError>(m, "ExperimentError", PyExc_RuntimeError);

  m.def("frac_weights", [](double d, std::size_t K) { return lmrnn::frac_weights(d, K).w; },
        "d"_a, "K"_a, "w_0..w_K of (1 - B)^d");
  m.def("frac_weights_grad", &lmrnn::frac_weights_grad, "d"_a, "K"_a);
  m.def("apply_fracdiff",
        [](const std::vector<double>& x, double d, std::size_t K) { return lmrnn::apply_fracdiff(x, d, K); },
        "x"_a, "d"_a, "K"_a = lmrnn::kDefaultFilterLag);
  m.def("apply_fracint",
        [](const std::vector<double>& x, double d) { return lmrnn::apply_fracint(x, d); }, "x"_a, "d"_a);

  m.def(
      "generate_arfima",
      [](std::vector<double> ar, std::vector<double> ma, double d, std::size_t n, std::uint64_t seed,
         double noise_std, std::size_t burn_in) {
        lmrnn::ArfimaSpec s;
        s.ar = std::move(ar);
        s.ma = std::move(ma);
        s.d = d;
        s.noise_std = noise_std;
        s.burn_in = burn_in;
        return lmrnn::generate_arfima(s, n, seed).column(0);
      },
      "ar"_a, "ma"_a, "d"_a, "n"_a, "seed"_a = 1, "noise_std"_a = 1.0, "burn_in"_a = 2000);
  m.def("generate_dataset",
        [](const std::string& spec_json) { return lmrnn::build_dataset(lmrnn::parse_dataset_spec(spec_json)).values; },
        "spec_json"_a, "Series described by a generator document, shape (n, dims)");

  m.def(
      "acf",
      [](const std::vector<double>& x, std::size_t max_lag) {
        const auto r = lmrnn::acf(x, max_lag);
        return py::dict("autocovariance"_a = r.autocovariance, "autocorrelation"_a = r.autocorrelation);
      },
      "x"_a, "max_lag"_a);
  m.def(
      "periodogram",
      [](const std::vector<double>& x) {
        const auto s = lmrnn::periodogram(x);
        return py::make_tuple(s.frequencies, s.ordinates);
      },
      "x"_a);
  m.def(
      "classify_memory",
      [](const std::vector<double>& x) {
        const auto c = lmrnn::classify_memory(x);
        return py::dict("label"_a = std::string(lmrnn::to_string(c.kind)), "d_hat"_a = c.d_hat,
                        "d_se"_a = c.d_se, "frequencies_used"_a = c.frequencies_used);
      },
      "x"_a);
  m.def(
      "classify_decay",
      [](const std::vector<double>& c, std::size_t tail_start) {
        return decay_dict(lmrnn::classify_decay(c, tail_start));
      },
      "coeffs"_a, "tail_start"_a = lmrnn::kDefaultTailStart);
  m.def("spectral_radius", &lmrnn::spectral_radius, "W"_a, "tol"_a = 1e-6);

  m.def(
      "init_params",
      [](const std::string& kind, std::size_t input, std::size_t hidden, std::size_t output,
         std::size_t K, std::uint64_t seed) {
        return lmrnn::params_to_json(
            lmrnn::init_params(lmrnn::parse_cell_kind(kind), {input, hidden, output}, K, seed));
      },
      "kind"_a, "input"_a = 1, "hidden"_a = 8, "output"_a = 1, "K"_a = lmrnn::kDefaultFilterLag,
      "seed"_a = 1, "Cell parameter JSON document");
  m.def(
      "forward",
      [](const std::string& params_json, const Eigen::MatrixXd& inputs) {
        return lmrnn::forward(lmrnn::params_from_json(params_json), inputs).outputs;
      },
      "params_json"_a, "inputs"_a, "Outputs (T, p_z) for inputs (T, p_x)");
  m.def("impulse_response", &impulse_table, "params_json"_a, "lags"_a);
  m.def(
      "check_ergodicity",
      [](const std::string& params_json, double a) {
        const auto p = lmrnn::params_from_json(params_json);
        return lmrnn::verdict_to_json(p.kind == lmrnn::CellKind::kLstm ? lmrnn::check_lstm_ergodicity(p, a)
                                                                       : lmrnn::check_rnn_ergodicity(p, a));
      },
      "params_json"_a, "a"_a = lmrnn::kDefaultContraction);

  m.def(
      "welch_ttest",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        const auto w = lmrnn::welch_ttest(a, b);
        return py::dict("t"_a = w.t, "df"_a = w.df, "p_one_sided"_a = w.p_one_sided);
      },
      "a"_a, "b"_a);
  m.def("run_cli", &run_cli, "args"_a, "Runs the command-line tool in process; returns (code, stdout, stderr)");
}
