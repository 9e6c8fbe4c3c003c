#pragma once

#include <stdexcept>
#include <string>

namespace isotherm {

/// A precondition on the mathematical domain of an operation was violated
/// (e.g. 1 - R*kappa <= 0, a negative product under a square root).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A numerical evaluation failed: degenerate metric, non-finite curvature,
/// projection that did not converge, linear solver breakdown.
class EvaluationError : public std::runtime_error {
 public:
  explicit EvaluationError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid user input: unknown surface kind, malformed config, bad grid.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace isotherm
