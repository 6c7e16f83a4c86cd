#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lmrnn {

// Error hierarchy. The CLI maps each family onto an exit code
// (config 2, data 3, numerical 4).

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Matrix or sequence shapes that do not fit together.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid experiment or model configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input data that cannot be analysed (constant series, too short, unreadable).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateSeriesError : public DataError {
 public:
  using DataError::DataError;
};

class InsufficientDataError : public DataError {
 public:
  using DataError::DataError;
};

/// A recursion left the finite range. `step()` is the zero-based timestep
/// at which the first non-finite or out-of-bound value appeared.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, std::size_t step)
      : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  [[nodiscard]] std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Degenerate inputs to a statistical test.
class StatisticsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Every run of a multi-seed experiment failed.
class ExperimentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller broke an API contract (e.g. a cache produced by different params).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace lmrnn
