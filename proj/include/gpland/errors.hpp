#pragma once

#include <stdexcept>
#include <string>

namespace gpland {

// Bad user input: malformed config, missing columns, impossible options.
// The CLI maps this class to its own exit code.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside a mathematical domain (x <= 0, negative variance, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical breakdown at runtime: overflow, non-finite intermediates.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Cholesky stayed indefinite after the whole jitter ladder.
class DecompositionError : public NumericalError {
 public:
  DecompositionError(const std::string& what, double final_jitter)
      : NumericalError(what), final_jitter_(final_jitter) {}
  double final_jitter() const noexcept { return final_jitter_; }

 private:
  double final_jitter_;
};

// Landscape exploration finished without a single converged minimum.
class ExplorationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace gpland
