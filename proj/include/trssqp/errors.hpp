#pragma once

#include <stdexcept>
#include <string>

namespace trssqp {

// Base class for all library errors so callers can catch one type.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

class UnknownProblem : public SolverError {
 public:
  explicit UnknownProblem(const std::string& key)
      : SolverError("unknown problem catalog key: " + key) {}
};

// Non-finite output from a problem evaluator; carries the component name.
class EvaluationFailure : public SolverError {
 public:
  explicit EvaluationFailure(const std::string& component)
      : SolverError("non-finite evaluation in component: " + component),
        component_(component) {}
  const std::string& component() const { return component_; }

 private:
  std::string component_;
};

class RankDeficientJacobian : public SolverError {
 public:
  RankDeficientJacobian() : SolverError("constraint Jacobian is rank deficient") {}
};

class EmptyNullSpace : public SolverError {
 public:
  EmptyNullSpace() : SolverError("constraint Jacobian has an empty null space (m = d)") {}
};

class DegenerateOracle : public SolverError {
 public:
  DegenerateOracle() : SolverError("sample-size denominator is zero (all noise levels zero)") {}
};

class CauchyCertificationFailure : public SolverError {
 public:
  CauchyCertificationFailure()
      : SolverError("explicit Cauchy point violates the fraction-of-Cauchy-decrease bound") {}
};

class MeritEscalationFailure : public SolverError {
 public:
  explicit MeritEscalationFailure(double mu)
      : SolverError("merit parameter exceeded its safeguard cap at " + std::to_string(mu)) {}
};

class DiagnosticsUnavailable : public SolverError {
 public:
  DiagnosticsUnavailable() : SolverError("iteration log lacks true-error bookkeeping") {}
};

class EmptyGroup : public SolverError {
 public:
  EmptyGroup() : SolverError("performance profile requires at least one record per group") {}
};

class ConfigError : public SolverError {
 public:
  explicit ConfigError(const std::string& msg) : SolverError("config error: " + msg) {}
};

}  // namespace trssqp
