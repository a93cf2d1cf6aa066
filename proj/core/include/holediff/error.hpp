#pragma once

#include <stdexcept>
#include <string>

namespace holediff {

/// A point or parameter lies outside the domain an operation is defined on.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A model configuration (hole endpoints, placement, scale) is inadmissible.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A request would exceed a resource guard (orbit length, scan size, ...).
class ResourceLimitError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// An iterative numerical method failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace holediff
