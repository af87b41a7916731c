#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fracsob {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A series or integral could not be evaluated to the requested accuracy.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, double partial = 0.0)
      : std::runtime_error(what), partial_(partial) {}

  /// Last partial sum (or partial value) reached before giving up.
  double partial() const noexcept { return partial_; }

 private:
  double partial_;
};

/// A quadrature rule could not reach its accuracy contract.
class ConstructionError : public std::runtime_error {
 public:
  ConstructionError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// A numerically checked property (operator bound or one of its clauses) failed.
class PropertyFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fixed-point iteration hit its iteration cap.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, std::vector<double> residuals)
      : std::runtime_error(what), residuals_(std::move(residuals)) {}
  const std::vector<double>& residuals() const noexcept { return residuals_; }

 private:
  std::vector<double> residuals_;
};

/// Problem instance violates the exponent conditions required for existence.
class RejectedInstance : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Optimizer could not evaluate a candidate control bundle.
class OptimizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace fracsob
