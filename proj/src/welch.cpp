#include <cmath>

#include <boost/math/special_functions/beta.hpp>

#include "lmrnn/errors.hpp"
#include "lmrnn/training.hpp"

namespace lmrnn {
namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;  // unbiased
  double n = 0.0;
};

Moments moments(std::span<const double> x) {
  Moments m;
  m.n = static_cast<double>(x.size());
  for (double v : x) m.mean += v;
  m.mean /= m.n;
  for (double v : x) m.var += (v - m.mean) * (v - m.mean);
  m.var /= m.n - 1.0;
  return m;
}

// P(T <= t) for Student t with df degrees of freedom.
double student_t_cdf(double t, double df) {
  const double tail = 0.5 * boost::math::ibeta(0.5 * df, 0.5, df / (df + t * t));
  return t < 0.0 ? tail : 1.0 - tail;
}

}  // namespace

WelchResult welch_ttest(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw StatisticsError("welch_ttest: each sample needs at least 2 values");
  }
  for (double v : a) {
    if (!std::isfinite(v)) throw StatisticsError("welch_ttest: non-finite value");
  }
  for (double v : b) {
    if (!std::isfinite(v)) throw StatisticsError("welch_ttest: non-finite value");
  }
  const Moments ma = moments(a);
  const Moments mb = moments(b);
  const double sa = ma.var / ma.n;
  const double sb = mb.var / mb.n;
  const double se2 = sa + sb;
  if (!(se2 > 0.0)) throw StatisticsError("welch_ttest: both samples have zero variance");
  WelchResult r;
  r.t = (ma.mean - mb.mean) / std::sqrt(se2);
  r.df = se2 * se2 / (sa * sa / (ma.n - 1.0) + sb * sb / (mb.n - 1.0));
  r.p_one_sided = student_t_cdf(r.t, r.df);
  return r;
}

}  // namespace lmrnn
