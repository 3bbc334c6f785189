#pragma once

#include <stdexcept>
#include <string>

namespace mchom {

// Bad inputs use std::invalid_argument directly.

/// A constraint set that cannot be imposed (empty continuum, dependent rows).
class DegeneracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Linear solver breakdown or residual above contract.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what + " (relative residual " + std::to_string(residual) + ")"),
        residual_(residual) {}

  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Config validation failure; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mchom
