#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "trssqp/types.hpp"

namespace trssqp {

// A known stationary point of a catalog problem, for documentation and tests.
struct StationaryPoint {
  Vector x;
  Vector lambda;
  bool second_order;  // true when the reduced Lagrangian Hessian is PSD there
  std::string note;
};

// Equality-constrained problem  min f(x)  s.t.  c(x) = 0,  with m < d.
// Evaluators must be pure functions of x; the model is immutable after
// construction and safe to share across concurrent solver runs.
struct ProblemModel {
  std::string name;
  int dim = 0;   // d
  int n_eq = 0;  // m
  Vector x0;

  std::function<double(const Vector&)> f;
  std::function<Vector(const Vector&)> grad_f;
  std::function<Matrix(const Vector&)> hess_f;
  std::function<Vector(const Vector&)> c;
  std::function<Matrix(const Vector&)> jac_c;                 // m x d
  std::function<Matrix(const Vector&, int)> hess_c;           // i-th constraint, d x d

  std::optional<double> f_inf_hint;
  std::vector<StationaryPoint> known_points;

  // False marks probe problems (e.g. the rank-deficient one) that exist only
  // for error-path tests and are excluded from convergence experiments.
  bool convergence_suite = true;
};

// One noiseless evaluation of every problem component at a point.
struct TrueEval {
  double f = 0.0;
  Vector g;
  Matrix hess_f;
  Vector c;
  Matrix G;
  std::vector<Matrix> hess_c;
};

/// Builds a catalog problem; throws UnknownProblem for an unrecognized key.
ProblemModel make_problem(const std::string& name);

/// All catalog keys in a fixed, documented order.
std::vector<std::string> problem_catalog_keys();

/// Noiseless evaluation; throws EvaluationFailure on any non-finite output.
TrueEval eval_true(const ProblemModel& p, const Vector& x);

/// True KKT residual ||(grad f + G^T lambda, c)|| with the least-squares
/// multiplier from exact data, and tau_plus = |min(tau, 0)| for the smallest
/// reduced Lagrangian-Hessian eigenvalue. tau_plus is 0 when ker(G) is empty.
std::pair<double, double> kkt_residual_true(const ProblemModel& p, const Vector& x);

/// Central-difference consistency check of grad_f vs f, jac_c vs c, and
/// hess_f vs grad_f at x. Returns the worst relative mismatch per group.
struct DerivativeCheck {
  double grad_rel_err;
  double jac_rel_err;
  double hess_rel_err;
};
DerivativeCheck self_check(const ProblemModel& p, const Vector& x);

}  // namespace trssqp
