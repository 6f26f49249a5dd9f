#pragma once

#include <stdexcept>
#include <string>

namespace aoi {

// Configuration or model validation failure (bad dimensions, out-of-range
// parameters, inconsistent cross-field settings).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Index or component outside the valid state space.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Non-finite value produced while building tables or iterating values.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Value iteration hit max_sweeps before the residual dropped below theta.
class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, double residual, long sweeps)
      : std::runtime_error(what), residual_(residual), sweeps_(sweeps) {}

  double residual() const noexcept { return residual_; }
  long sweeps() const noexcept { return sweeps_; }

 private:
  double residual_;
  long sweeps_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace aoi
