#pragma once

#include <vector>

namespace lmrnn::testing {

// Reference values from scipy.stats.ttest_ind(a, b, equal_var=False,
// alternative="less").
struct WelchFixture {
  const char* name;
  std::vector<double> a;
  std::vector<double> b;
  double t;
  double df;
  double p;
};

inline std::vector<WelchFixture> welch_fixtures() {
  return {
      {"fifteen-fourteen",
       {27.5, 21.0, 19.0, 23.6, 17.0, 17.9, 16.9, 20.1, 21.9, 22.6, 23.1, 19.6, 19.0, 21.7, 21.4},
       {27.1, 22.0, 20.8, 23.4, 23.4, 23.5, 25.8, 22.0, 24.8, 20.2, 21.9, 22.1, 22.9, 30.6},
       -2.704958128809914, 26.935245387677913, 0.005848568201208452},
      {"ten-twenty",
       {19.8, 20.4, 19.6, 17.8, 18.5, 18.9, 18.3, 18.9, 19.5, 22.0},
       {28.2, 26.6, 20.1, 23.3, 25.2, 22.1, 17.7, 27.6, 20.6, 13.7,
        23.2, 17.5, 20.6, 18.0, 23.9, 21.6, 24.3, 20.4, 23.9, 13.3},
       -2.225512039969852, 24.524634944257343, 0.017742265415005162},
      {"five-six",
       {1.2, 2.3, 3.1, 4.8, 5.0},
       {2.9, 3.5, 4.1, 5.6, 6.2, 7.0},
       -1.6287688061181975, 8.636889323892854, 0.06961034225422733},
  };
}

}  // namespace lmrnn::testing
