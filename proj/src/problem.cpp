#include "trssqp/problem.hpp"

#include <cmath>
#include <map>

#include <Eigen/Dense>

#include "trssqp/errors.hpp"
#include "trssqp/linops.hpp"

namespace trssqp {

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

// f(x) = 0.5 ||x||^2,  c(x) = x1 + x2 - 1.  Minimizer (0.5, 0.5), lambda -0.5.
ProblemModel quad_linear() {
  ProblemModel p;
  p.name = "quad-linear";
  p.dim = 2;
  p.n_eq = 1;
  p.x0 = vec2(0.0, 0.0);
  p.f = [](const Vector& x) { return 0.5 * x.squaredNorm(); };
  p.grad_f = [](const Vector& x) { return x; };
  p.hess_f = [](const Vector& x) { return Matrix::Identity(x.size(), x.size()); };
  p.c = [](const Vector& x) {
    Vector c(1);
    c << x(0) + x(1) - 1.0;
    return c;
  };
  p.jac_c = [](const Vector& x) {
    Matrix G(1, x.size());
    G << 1.0, 1.0;
    return G;
  };
  p.hess_c = [](const Vector& x, int) { return Matrix::Zero(x.size(), x.size()); };
  p.f_inf_hint = 0.0;
  {
    Vector lam(1);
    lam << -0.5;
    p.known_points.push_back({vec2(0.5, 0.5), lam, true, "global constrained minimizer"});
  }
  return p;
}

// Rosenbrock objective restricted to the circle x1^2 + x2^2 = 2 through (1,1).
ProblemModel rosenbrock_sphere() {
  ProblemModel p;
  p.name = "rosenbrock-sphere";
  p.dim = 2;
  p.n_eq = 1;
  p.x0 = vec2(-1.2, 1.0);
  p.f = [](const Vector& x) {
    const double a = x(1) - x(0) * x(0);
    const double b = 1.0 - x(0);
    return 100.0 * a * a + b * b;
  };
  p.grad_f = [](const Vector& x) {
    const double a = x(1) - x(0) * x(0);
    return vec2(-400.0 * a * x(0) - 2.0 * (1.0 - x(0)), 200.0 * a);
  };
  p.hess_f = [](const Vector& x) {
    Matrix H(2, 2);
    H(0, 0) = -400.0 * (x(1) - 3.0 * x(0) * x(0)) + 2.0;
    H(0, 1) = -400.0 * x(0);
    H(1, 0) = H(0, 1);
    H(1, 1) = 200.0;
    return H;
  };
  p.c = [](const Vector& x) {
    Vector c(1);
    c << x.squaredNorm() - 2.0;
    return c;
  };
  p.jac_c = [](const Vector& x) {
    Matrix G(1, 2);
    G << 2.0 * x(0), 2.0 * x(1);
    return G;
  };
  p.hess_c = [](const Vector&, int) { return 2.0 * Matrix::Identity(2, 2); };
  p.f_inf_hint = 0.0;
  {
    Vector lam(1);
    lam << 0.0;
    p.known_points.push_back({vec2(1.0, 1.0), lam, true, "global constrained minimizer"});
  }
  return p;
}

// Quartic double well along x1 with a linear constraint pinning x2 = 0.
// The origin is first-order stationary with reduced curvature -1; the
// second-order points are (+-1, 0) with reduced curvature 2.
ProblemModel saddle() {
  ProblemModel p;
  p.name = "saddle";
  p.dim = 2;
  p.n_eq = 1;
  p.x0 = vec2(0.0, 0.0);
  p.f = [](const Vector& x) {
    const double t = x(0) * x(0);
    return 0.25 * t * t - 0.5 * t + 0.5 * x(1) * x(1);
  };
  p.grad_f = [](const Vector& x) {
    return vec2(x(0) * x(0) * x(0) - x(0), x(1));
  };
  p.hess_f = [](const Vector& x) {
    Matrix H = Matrix::Zero(2, 2);
    H(0, 0) = 3.0 * x(0) * x(0) - 1.0;
    H(1, 1) = 1.0;
    return H;
  };
  p.c = [](const Vector& x) {
    Vector c(1);
    c << x(1);
    return c;
  };
  p.jac_c = [](const Vector&) {
    Matrix G(1, 2);
    G << 0.0, 1.0;
    return G;
  };
  p.hess_c = [](const Vector&, int) { return Matrix::Zero(2, 2); };
  p.f_inf_hint = -0.25;
  {
    Vector lam = Vector::Zero(1);
    p.known_points.push_back({vec2(0.0, 0.0), lam, false, "saddle, reduced curvature -1"});
    p.known_points.push_back({vec2(1.0, 0.0), lam, true, "minimizer, reduced curvature 2"});
    p.known_points.push_back({vec2(-1.0, 0.0), lam, true, "minimizer, reduced curvature 2"});
  }
  return p;
}

// min 2(x1^2 + x2^2 - 1) - x1  s.t.  x1^2 + x2^2 = 1.
// Trial steps near the minimizer (1, 0) raise both f and ||c||; starting at
// the antipodal saddle (-1, 0) makes rejected eigen steps stall the iteration
// unless a second-order correction is applied.
ProblemModel maratos() {
  ProblemModel p;
  p.name = "maratos";
  p.dim = 2;
  p.n_eq = 1;
  p.x0 = vec2(-1.0, 0.0);
  p.f = [](const Vector& x) { return 2.0 * (x.squaredNorm() - 1.0) - x(0); };
  p.grad_f = [](const Vector& x) { return vec2(4.0 * x(0) - 1.0, 4.0 * x(1)); };
  p.hess_f = [](const Vector&) { return 4.0 * Matrix::Identity(2, 2); };
  p.c = [](const Vector& x) {
    Vector c(1);
    c << x.squaredNorm() - 1.0;
    return c;
  };
  p.jac_c = [](const Vector& x) {
    Matrix G(1, 2);
    G << 2.0 * x(0), 2.0 * x(1);
    return G;
  };
  p.hess_c = [](const Vector&, int) { return 2.0 * Matrix::Identity(2, 2); };
  p.f_inf_hint = -2.125;  // unconstrained minimum at (1/4, 0)
  {
    Vector lam(1);
    lam << -1.5;
    p.known_points.push_back({vec2(1.0, 0.0), lam, true, "constrained minimizer"});
    lam << -2.5;
    p.known_points.push_back({vec2(-1.0, 0.0), lam, false, "saddle, reduced curvature -1"});
  }
  return p;
}

// Diagonal quadratic with two independent linear constraints (m = 2).
// KKT solve gives x* = (2/3, 1/3, 4/7, 3/7), lambda* = (-2/3, -12/7).
ProblemModel quad_two_linear() {
  ProblemModel p;
  p.name = "quad-2lin";
  p.dim = 4;
  p.n_eq = 2;
  p.x0 = Vector::Zero(4);
  const Eigen::Vector4d diag(1.0, 2.0, 3.0, 4.0);
  p.f = [diag](const Vector& x) { return 0.5 * x.dot(diag.asDiagonal() * x); };
  p.grad_f = [diag](const Vector& x) { return Vector(diag.asDiagonal() * x); };
  p.hess_f = [diag](const Vector&) { return Matrix(diag.asDiagonal()); };
  p.c = [](const Vector& x) {
    Vector c(2);
    c << x(0) + x(1) - 1.0, x(2) + x(3) - 1.0;
    return c;
  };
  p.jac_c = [](const Vector&) {
    Matrix G = Matrix::Zero(2, 4);
    G(0, 0) = G(0, 1) = 1.0;
    G(1, 2) = G(1, 3) = 1.0;
    return G;
  };
  p.hess_c = [](const Vector&, int) { return Matrix::Zero(4, 4); };
  p.f_inf_hint = 0.0;
  {
    Vector xs(4), lam(2);
    xs << 2.0 / 3.0, 1.0 / 3.0, 4.0 / 7.0, 3.0 / 7.0;
    lam << -2.0 / 3.0, -12.0 / 7.0;
    p.known_points.push_back({xs, lam, true, "global constrained minimizer"});
  }
  return p;
}

// min 2(x1^2 + x2^2 - 1) - x1 - 3 x2  s.t.  x1^2 + x2^2 = 1.
// On-circle objective -x1 - 3 x2; minimizer a/||a|| for a = (1, 3) with
// lambda = (sqrt(10) - 4) / 2, saddle at the antipode. The kernel is not
// orthogonal to the all-ones direction, so gradient noise stays visible.
ProblemModel tilted_circle() {
  ProblemModel p;
  p.name = "tilted-circle";
  p.dim = 2;
  p.n_eq = 1;
  p.x0 = vec2(std::cos(2.0), std::sin(2.0));
  p.f = [](const Vector& x) {
    return 2.0 * (x.squaredNorm() - 1.0) - x(0) - 3.0 * x(1);
  };
  p.grad_f = [](const Vector& x) { return vec2(4.0 * x(0) - 1.0, 4.0 * x(1) - 3.0); };
  p.hess_f = [](const Vector&) { return 4.0 * Matrix::Identity(2, 2); };
  p.c = [](const Vector& x) {
    Vector c(1);
    c << x.squaredNorm() - 1.0;
    return c;
  };
  p.jac_c = [](const Vector& x) {
    Matrix G(1, 2);
    G << 2.0 * x(0), 2.0 * x(1);
    return G;
  };
  p.hess_c = [](const Vector&, int) { return 2.0 * Matrix::Identity(2, 2); };
  {
    const double s = std::sqrt(10.0);
    Vector lam(1);
    lam << (s - 4.0) / 2.0;
    p.known_points.push_back({vec2(1.0 / s, 3.0 / s), lam, true, "constrained minimizer"});
    lam << -(s + 4.0) / 2.0;
    p.known_points.push_back(
        {vec2(-1.0 / s, -3.0 / s), lam, false, "saddle, reduced curvature -sqrt(10)"});
  }
  return p;
}

// Diagonal quadratic with a linear constraint whose normal (1, 0, -1) is
// orthogonal to the all-ones direction; minimizer e1 with multiplier 1.
ProblemModel quad_three_linear() {
  ProblemModel p;
  p.name = "quad-3lin";
  p.dim = 3;
  p.n_eq = 1;
  p.x0 = Vector::Zero(3);
  const Eigen::Vector3d diag(1.0, 2.0, 3.0);
  const Eigen::Vector3d a(1.0, 0.0, -1.0);
  const Eigen::Vector3d b(2.0, 0.0, -1.0);  // = D e1 + a
  p.f = [diag, b](const Vector& x) {
    return 0.5 * x.dot(diag.asDiagonal() * x) - b.dot(x);
  };
  p.grad_f = [diag, b](const Vector& x) {
    return Vector(diag.asDiagonal() * x - b);
  };
  p.hess_f = [diag](const Vector&) { return Matrix(diag.asDiagonal()); };
  p.c = [a](const Vector& x) {
    Vector c(1);
    c << a.dot(x) - 1.0;
    return c;
  };
  p.jac_c = [a](const Vector&) {
    Matrix G(1, 3);
    G << a(0), a(1), a(2);
    return G;
  };
  p.hess_c = [](const Vector&, int) { return Matrix::Zero(3, 3); };
  {
    Vector xs(3), lam(1);
    xs << 1.0, 0.0, 0.0;
    lam << 1.0;
    p.known_points.push_back({xs, lam, true, "global constrained minimizer"});
  }
  return p;
}

// Ten-dimensional quadratic with an alternating-sign linear constraint.
// The constraint normal is orthogonal to the all-ones direction, so the
// shared-scalar gradient noise acts fully inside the null space; minimizer
// e1 with lambda = 0.
ProblemModel quad_ten() {
  ProblemModel p;
  p.name = "quad-10d";
  p.dim = 10;
  p.n_eq = 1;
  p.x0 = Vector::Zero(10);
  Vector a(10);
  for (int i = 0; i < 10; ++i) a(i) = (i % 2 == 0) ? 1.0 : -1.0;
  p.f = [](const Vector& x) { return 0.5 * x.squaredNorm() - x(0); };
  p.grad_f = [](const Vector& x) {
    Vector g = x;
    g(0) -= 1.0;
    return g;
  };
  p.hess_f = [](const Vector& x) { return Matrix::Identity(x.size(), x.size()); };
  p.c = [a](const Vector& x) {
    Vector c(1);
    c << a.dot(x) - 1.0;
    return c;
  };
  p.jac_c = [a](const Vector&) {
    Matrix G(1, 10);
    for (int i = 0; i < 10; ++i) G(0, i) = a(i);
    return G;
  };
  p.hess_c = [](const Vector&, int) { return Matrix::Zero(10, 10); };
  {
    Vector xs = Vector::Zero(10);
    xs(0) = 1.0;
    Vector lam = Vector::Zero(1);
    p.known_points.push_back({xs, lam, true, "global constrained minimizer"});
  }
  return p;
}

// Maratos-style objective on the unit sphere in 20 variables; minimizer e1,
// saddle at -e1. The 19-dimensional tangent space keeps the all-ones noise
// direction at norm sqrt(19) near the solution.
ProblemModel sphere_twenty() {
  ProblemModel p;
  p.name = "sphere-20d";
  p.dim = 20;
  p.n_eq = 1;
  p.x0 = Vector::Zero(20);
  p.x0(0) = std::cos(0.3);
  p.x0(1) = std::sin(0.3);
  p.f = [](const Vector& x) { return 2.0 * (x.squaredNorm() - 1.0) - x(0); };
  p.grad_f = [](const Vector& x) {
    Vector g = 4.0 * x;
    g(0) -= 1.0;
    return g;
  };
  p.hess_f = [](const Vector& x) {
    return Matrix(4.0 * Matrix::Identity(x.size(), x.size()));
  };
  p.c = [](const Vector& x) {
    Vector c(1);
    c << x.squaredNorm() - 1.0;
    return c;
  };
  p.jac_c = [](const Vector& x) { return Matrix(2.0 * x.transpose()); };
  p.hess_c = [](const Vector& x, int) {
    return Matrix(2.0 * Matrix::Identity(x.size(), x.size()));
  };
  {
    Vector xs = Vector::Zero(20);
    xs(0) = 1.0;
    Vector lam(1);
    lam << -1.5;
    p.known_points.push_back({xs, lam, true, "constrained minimizer"});
    xs(0) = -1.0;
    lam << -2.5;
    p.known_points.push_back({xs, lam, false, "saddle, reduced curvature -1"});
  }
  return p;
}

// Anisotropic quadratic in 12 variables with a tilted linear constraint.
// Constructed so the minimizer is exactly e1 with multiplier 1; the
// constraint normal alternates signs and is orthogonal to the all-ones
// direction.
ProblemModel aniso_twelve() {
  ProblemModel p;
  p.name = "aniso-12d";
  p.dim = 12;
  p.n_eq = 1;
  p.x0 = Vector::Zero(12);
  Vector diag(12), a(12);
  for (int i = 0; i < 12; ++i) {
    diag(i) = (i + 1) / 4.0;
    a(i) = (i % 2 == 0) ? 1.0 : -1.0;
  }
  Vector b = a;
  b(0) += diag(0);  // b = D e1 + a
  p.f = [diag, b](const Vector& x) {
    return 0.5 * x.dot(diag.asDiagonal() * x) - b.dot(x);
  };
  p.grad_f = [diag, b](const Vector& x) { return Vector(diag.asDiagonal() * x - b); };
  p.hess_f = [diag](const Vector&) { return Matrix(diag.asDiagonal()); };
  p.c = [a](const Vector& x) {
    Vector c(1);
    c << a.dot(x) - 1.0;
    return c;
  };
  p.jac_c = [a](const Vector&) { return Matrix(a.transpose()); };
  p.hess_c = [](const Vector&, int) { return Matrix::Zero(12, 12); };
  {
    Vector xs = Vector::Zero(12);
    xs(0) = 1.0;
    Vector lam(1);
    lam << 1.0;
    p.known_points.push_back({xs, lam, true, "global constrained minimizer"});
  }
  return p;
}

// Duplicated linear constraints make G rank 1 < m = 2 everywhere.
// Probe problem for error paths only.
ProblemModel degenerate() {
  ProblemModel p;
  p.name = "degenerate";
  p.dim = 3;
  p.n_eq = 2;
  p.x0 = Vector::Zero(3);
  p.f = [](const Vector& x) { return 0.5 * x.squaredNorm(); };
  p.grad_f = [](const Vector& x) { return x; };
  p.hess_f = [](const Vector& x) { return Matrix::Identity(x.size(), x.size()); };
  p.c = [](const Vector& x) {
    Vector c(2);
    c << x(0) + x(1) - 1.0, 2.0 * x(0) + 2.0 * x(1) - 2.0;
    return c;
  };
  p.jac_c = [](const Vector&) {
    Matrix G(2, 3);
    G << 1.0, 1.0, 0.0, 2.0, 2.0, 0.0;
    return G;
  };
  p.hess_c = [](const Vector&, int) { return Matrix::Zero(3, 3); };
  p.convergence_suite = false;
  return p;
}

using Factory = ProblemModel (*)();

const std::map<std::string, Factory>& catalog() {
  static const std::map<std::string, Factory> k = {
      {"quad-linear", quad_linear},
      {"rosenbrock-sphere", rosenbrock_sphere},
      {"saddle", saddle},
      {"maratos", maratos},
      {"tilted-circle", tilted_circle},
      {"quad-2lin", quad_two_linear},
      {"quad-10d", quad_ten},
      {"sphere-20d", sphere_twenty},
      {"aniso-12d", aniso_twelve},
      {"quad-3lin", quad_three_linear},
      {"degenerate", degenerate},
  };
  return k;
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw EvaluationFailure(what);
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& v, const char* what) {
  if (!v.allFinite()) throw EvaluationFailure(what);
}

}  // namespace

ProblemModel make_problem(const std::string& name) {
  auto it = catalog().find(name);
  if (it == catalog().end()) throw UnknownProblem(name);
  return it->second();
}

std::vector<std::string> problem_catalog_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : catalog()) keys.push_back(k);
  return keys;
}

TrueEval eval_true(const ProblemModel& p, const Vector& x) {
  require_finite(x, "x");
  TrueEval e;
  e.f = p.f(x);
  require_finite(e.f, "f");
  e.g = p.grad_f(x);
  require_finite(e.g, "grad_f");
  e.hess_f = p.hess_f(x);
  require_finite(e.hess_f, "hess_f");
  e.c = p.c(x);
  require_finite(e.c, "c");
  e.G = p.jac_c(x);
  require_finite(e.G, "jac_c");
  e.hess_c.reserve(p.n_eq);
  for (int i = 0; i < p.n_eq; ++i) {
    e.hess_c.push_back(p.hess_c(x, i));
    require_finite(e.hess_c.back(), "hess_c");
  }
  return e;
}

std::pair<double, double> kkt_residual_true(const ProblemModel& p, const Vector& x) {
  const TrueEval e = eval_true(p, x);
  const Vector lambda = least_squares_multiplier(e.G, e.g);

  Vector grad_L = e.g + e.G.transpose() * lambda;
  const double kkt = std::sqrt(grad_L.squaredNorm() + e.c.squaredNorm());

  double tau_plus = 0.0;
  if (p.dim > p.n_eq) {
    Matrix hess_L = e.hess_f;
    for (int i = 0; i < p.n_eq; ++i) hess_L += lambda(i) * e.hess_c[i];
    const NullBasis basis = nullspace_basis(e.G);
    const double tau = reduced_min_eigenpair(hess_L, basis).first;
    tau_plus = std::abs(std::min(tau, 0.0));
  }
  return {kkt, tau_plus};
}

DerivativeCheck self_check(const ProblemModel& p, const Vector& x) {
  const int d = p.dim;
  const TrueEval e = eval_true(p, x);

  auto step = [&](int i) { return 1e-6 * std::max(1.0, std::abs(x(i))); };

  Vector fd_g(d);
  Matrix fd_G(p.n_eq, d), fd_H(d, d);
  for (int i = 0; i < d; ++i) {
    Vector xp = x, xm = x;
    const double h = step(i);
    xp(i) += h;
    xm(i) -= h;
    fd_g(i) = (p.f(xp) - p.f(xm)) / (2.0 * h);
    fd_G.col(i) = (p.c(xp) - p.c(xm)) / (2.0 * h);
    fd_H.col(i) = (p.grad_f(xp) - p.grad_f(xm)) / (2.0 * h);
  }
  fd_H = 0.5 * (fd_H + fd_H.transpose());

  auto rel = [](double err, double scale) { return err / std::max(1.0, scale); };
  return DerivativeCheck{
      rel((fd_g - e.g).norm(), e.g.norm()),
      rel((fd_G - e.G).norm(), e.G.norm()),
      rel((fd_H - e.hess_f).norm(), e.hess_f.norm()),
  };
}

}  // namespace trssqp
