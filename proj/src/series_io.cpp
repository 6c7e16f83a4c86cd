#include "lmrnn/series_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "lmrnn/errors.hpp"

namespace lmrnn {

TimeSeries::TimeSeries(Eigen::MatrixXd v, std::vector<std::string> column_names)
    : values(std::move(v)), names(std::move(column_names)) {
  if (names.empty()) {
    if (values.cols() == 1) {
      names.emplace_back("y");
    } else {
      for (Eigen::Index c = 0; c < values.cols(); ++c) names.push_back("y" + std::to_string(c + 1));
    }
  }
  if (static_cast<Eigen::Index>(names.size()) != values.cols()) {
    throw ShapeError("TimeSeries: column name count does not match data");
  }
}

TimeSeries TimeSeries::univariate(const std::vector<double>& x, std::string name) {
  Eigen::MatrixXd v(static_cast<Eigen::Index>(x.size()), 1);
  for (std::size_t i = 0; i < x.size(); ++i) v(static_cast<Eigen::Index>(i), 0) = x[i];
  return TimeSeries(std::move(v), {std::move(name)});
}

std::vector<double> TimeSeries::column(std::size_t c) const {
  std::vector<double> out(length());
  for (std::size_t t = 0; t < out.size(); ++t) {
    out[t] = values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c));
  }
  return out;
}

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::kIdentity: return "identity";
    case Activation::kRelu: return "relu";
    case Activation::kSigmoid: return "sigmoid";
    case Activation::kTanh: return "tanh";
    case Activation::kSoftmax: return "softmax";
  }
  return "identity";
}

Activation parse_activation(std::string_view name) {
  if (name == "identity" || name == "linear") return Activation::kIdentity;
  if (name == "relu") return Activation::kRelu;
  if (name == "sigmoid") return Activation::kSigmoid;
  if (name == "tanh") return Activation::kTanh;
  if (name == "softmax") return Activation::kSoftmax;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

bool is_bounded(Activation a) {
  return a == Activation::kSigmoid || a == Activation::kTanh || a == Activation::kSoftmax;
}

Eigen::VectorXd activate(Activation a, const Eigen::VectorXd& pre) {
  switch (a) {
    case Activation::kIdentity: return pre;
    case Activation::kRelu: return pre.cwiseMax(0.0);
    case Activation::kSigmoid: return pre.unaryExpr([](double v) { return sigmoid(v); });
    case Activation::kTanh: return pre.array().tanh().matrix();
    case Activation::kSoftmax: {
      const double mx = pre.maxCoeff();
      Eigen::VectorXd e = (pre.array() - mx).exp().matrix();
      return e / e.sum();
    }
  }
  return pre;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc{}) return "nan";
  return {buf, ptr};
}

void write_csv(std::ostream& os, const TimeSeries& series) {
  for (std::size_t c = 0; c < series.names.size(); ++c) {
    if (c) os << ',';
    os << series.names[c];
  }
  os << '\n';
  for (Eigen::Index t = 0; t < series.values.rows(); ++t) {
    for (Eigen::Index c = 0; c < series.values.cols(); ++c) {
      if (c) os << ',';
      os << format_double(series.values(t, c));
    }
    os << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const TimeSeries& series) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open '" + path.string() + "' for writing");
  write_csv(os, series);
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    std::size_t b = 0;
    while (b < cell.size() && cell[b] == ' ') ++b;
    cells.push_back(cell.substr(b));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

TimeSeries read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DataError("CSV input is empty");
  auto header = split_line(line);
  if (header.empty()) throw DataError("CSV header is empty");

  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_line(line);
    if (cells.size() != header.size()) {
      throw DataError("CSV line " + std::to_string(lineno) + ": expected " +
                      std::to_string(header.size()) + " fields, got " +
                      std::to_string(cells.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto& s = cells[c];
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), row[c]);
      if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw DataError("CSV line " + std::to_string(lineno) + ": '" + s + "' is not a number");
      }
    }
    rows.push_back(std::move(row));
  }

  Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(header.size()));
  for (std::size_t t = 0; t < rows.size(); ++t) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c)) = rows[t][c];
    }
  }
  return TimeSeries(std::move(values), std::move(header));
}

TimeSeries read_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open '" + path.string() + "'");
  return read_csv(is);
}

void write_table(const std::filesystem::path& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size()) throw ShapeError("write_table: header/column mismatch");
  std::ofstream os(path);
  if (!os) throw DataError("cannot open '" + path.string() + "' for writing");
  for (std::size_t c = 0; c < header.size(); ++c) os << (c ? "," : "") << header[c];
  os << '\n';
  const std::size_t n = columns.empty() ? 0 : columns.front().size();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      os << (c ? "," : "") << format_double(columns[c].at(r));
    }
    os << '\n';
  }
}

}  // namespace lmrnn
