#pragma once

#include <cstdint>
#include <random>

namespace lmrnn {

/// Named random streams derived from one user seed. Each consumer draws from
/// its own stream so that, for example, changing the initialisation scheme
/// never perturbs the simulated data.
enum class Stream : std::uint64_t {
  kNoise = 1,      // innovations of generated series
  kInit = 2,       // network parameter initialisation
  kSpec = 3,       // random model specs (process presets, test fixtures)
};

/// Portable seeded generator.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Distributions are implemented here rather than taken from
/// <random>, because std::uniform_real_distribution and
/// std::normal_distribution are implementation-defined and would make
/// results differ between standard libraries.
///
/// Stream splitting: the engine for (seed, stream) is seeded with
/// splitmix64(seed) ^ splitmix64(splitmix64(stream)).
class Rng {
 public:
  explicit Rng(std::uint64_t seed, Stream stream = Stream::kNoise);
  Rng(std::uint64_t seed, std::uint64_t stream);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via the Marsaglia polar method.
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace lmrnn
