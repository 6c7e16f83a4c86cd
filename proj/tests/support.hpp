#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include <Eigen/Core>

#include "lmrnn/networks.hpp"
#include "lmrnn/rng.hpp"

namespace lmrnn::testing {

inline Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng, double scale = 1.0) {
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index j = 0; j < c; ++j) {
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = rng.uniform(-scale, scale);
  }
  return m;
}

/// Every tensor, biases and theta included, uniform in [-scale, scale].
inline void randomize(CellParams& p, std::uint64_t seed, double scale) {
  Rng rng(seed, Stream::kSpec);
  for (auto& [name, t] : p.tensors) t = random_matrix(t.rows(), t.cols(), rng, scale);
}

/// Scalar objective sum_t <G_t, z_t>.
inline double weighted_output(const CellParams& p, const Eigen::MatrixXd& x, const Eigen::MatrixXd& G) {
  const auto fr = forward(p, x);
  return (fr.outputs.array() * G.array()).sum();
}

struct GradCheck {
  double worst_rel = 0.0;
  std::string worst_name;
};

/// Compares backward() against central differences entry by entry.
/// Relative error |a - n| / max(|a|, |n|, floor).
inline GradCheck check_gradients(const CellParams& p, const Eigen::MatrixXd& x,
                                 const Eigen::MatrixXd& G, double h = 1e-5, double floor = 1e-4) {
  const auto fr = forward(p, x);
  const Gradients g = backward(p, fr.cache, G);
  GradCheck out;
  for (const auto& [name, t] : p.tensors) {
    for (Eigen::Index k = 0; k < t.size(); ++k) {
      CellParams plus = p;
      CellParams minus = p;
      plus.tensors.at(name).data()[k] += h;
      minus.tensors.at(name).data()[k] -= h;
      const double num = (weighted_output(plus, x, G) - weighted_output(minus, x, G)) / (2 * h);
      const double ana = g.at(name).data()[k];
      const double rel =
          std::abs(ana - num) / std::max({std::abs(ana), std::abs(num), floor});
      if (rel > out.worst_rel) {
        out.worst_rel = rel;
        out.worst_name = name + "[" + std::to_string(k) + "]";
      }
    }
  }
  return out;
}

}  // namespace lmrnn::testing
