#include "trssqp/steps.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "trssqp/errors.hpp"

namespace trssqp {

RadiusSplit split_radius(double delta, const Vector& c, double G_norm,
                         const Vector& grad_L, double H_norm, double tau_plus,
                         StepKind kind) {
  const double h = std::max(H_norm, kHessNormFloor);
  const double c_rs = c.norm() / G_norm;
  const double tang_rs = kind == StepKind::Gradient ? grad_L.norm() / h : tau_plus / h;

  RadiusSplit split;
  split.kind = kind;
  const double joint = std::hypot(c_rs, tang_rs);
  if (joint < 1e-14) return split;  // degenerate zero-residual case
  split.breve = delta * c_rs / joint;
  split.tilde = delta * tang_rs / joint;
  return split;
}

std::pair<Vector, double> normal_step(const Vector& v, double breve) {
  const double vn = v.norm();
  const double gamma_bar = (vn == 0.0) ? 1.0 : std::min(breve / vn, 1.0);
  return {gamma_bar * v, gamma_bar};
}

double reduced_model_value(const Matrix& A, const Vector& b, const Vector& u) {
  return 0.5 * u.dot(A * u) + b.dot(u);
}

Vector cauchy_point(const Matrix& A, const Vector& b, double radius) {
  const double bn = b.norm();
  if (bn == 0.0 || radius <= 0.0) return Vector::Zero(b.size());
  const double curv = b.dot(A * b);  // curvature along the steepest descent ray
  double step = radius / bn;
  if (curv > 0.0) step = std::min(step, bn * bn / curv);
  return -step * b;
}

namespace {

// Fraction-of-Cauchy-decrease bound: -(kappa/2) ||b|| min(radius, ||b||/||A||),
// with the second arm dropped when A vanishes.
double cauchy_bound(double b_norm, double A_norm, double radius, double kappa_fcd) {
  double arm = radius;
  if (A_norm > 0.0) arm = std::min(arm, b_norm / A_norm);
  return -0.5 * kappa_fcd * b_norm * arm;
}

// Exact trust-region subproblem solve via eigendecomposition of A and a
// safeguarded Newton iteration on the secular equation.
Vector solve_trs_exact(const Matrix& A, const Vector& b, double radius) {
  const int n = static_cast<int>(b.size());
  Eigen::SelfAdjointEigenSolver<Matrix> es(A);
  const Vector lam = es.eigenvalues();
  const Matrix Q = es.eigenvectors();
  const Vector bt = Q.transpose() * b;

  auto u_of = [&](double mu) -> Vector {
    Vector y(n);
    for (int i = 0; i < n; ++i) {
      const double den = lam(i) + mu;
      y(i) = den != 0.0 ? -bt(i) / den : 0.0;
    }
    return y;
  };

  // Interior solution when A is positive definite and the Newton point fits.
  if (lam(0) > 0.0) {
    Vector y = u_of(0.0);
    if (y.norm() <= radius) return Q * y;
  }

  const double mu_floor = std::max(0.0, -lam(0));

  // Hard case: no component of b along the bottom eigenspace, and the
  // remaining components already fit inside the ball at mu = -lam_min.
  {
    double norm2 = 0.0;
    bool degenerate_dir = false;
    const double tol = 1e-13 * std::max(1.0, b.norm());
    for (int i = 0; i < n; ++i) {
      const double den = lam(i) + mu_floor;
      if (std::abs(den) <= 1e-12 * std::max(1.0, std::abs(lam(n - 1)))) {
        if (std::abs(bt(i)) > tol) { degenerate_dir = false; break; }
        degenerate_dir = true;
      } else {
        norm2 += (bt(i) / den) * (bt(i) / den);
      }
    }
    if (degenerate_dir && norm2 <= radius * radius) {
      Vector y(n);
      for (int i = 0; i < n; ++i) {
        const double den = lam(i) + mu_floor;
        y(i) = std::abs(den) > 1e-12 * std::max(1.0, std::abs(lam(n - 1))) ? -bt(i) / den : 0.0;
      }
      const double extra = std::sqrt(std::max(0.0, radius * radius - norm2));
      y(0) += extra;  // pad along the bottom eigendirection to the boundary
      return Q * y;
    }
  }

  // Boundary solution: find mu > mu_floor with ||u(mu)|| = radius. The
  // reciprocal-norm form phi(mu) = 1/||u|| - 1/radius is nearly linear.
  double lo = mu_floor;
  double hi = std::max(mu_floor * 2.0, mu_floor + 1.0) + b.norm() / radius;
  while (u_of(hi).norm() > radius) hi = 2.0 * hi + 1.0;
  double mu = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const Vector y = u_of(mu);
    const double norm = y.norm();
    if (std::abs(norm - radius) <= 1e-13 * radius) break;
    if (norm > radius) lo = mu; else hi = mu;
    // Newton step on phi; fall back to bisection when it leaves the bracket.
    double dnorm2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double den = lam(i) + mu;
      dnorm2 += bt(i) * bt(i) / (den * den * den);
    }
    const double dphi = dnorm2 / (norm * norm * norm);  // d(1/norm)/dmu
    double next = mu;
    if (dphi > 0.0) next = mu + (1.0 / norm - 1.0 / radius) / -dphi;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    mu = next;
  }
  return Q * u_of(mu);
}

// Steihaug truncated conjugate gradient for large reduced dimensions.
Vector solve_trs_steihaug(const Matrix& A, const Vector& b, double radius) {
  const int n = static_cast<int>(b.size());
  Vector u = Vector::Zero(n);
  Vector r = -b;  // residual of the model gradient, seeded by steepest descent
  Vector p = r;
  double rr = r.squaredNorm();
  if (std::sqrt(rr) == 0.0) return u;

  auto to_boundary = [&](const Vector& base, const Vector& dir) {
    // Positive root of ||base + t dir|| = radius.
    const double a = dir.squaredNorm();
    const double bq = 2.0 * base.dot(dir);
    const double cq = base.squaredNorm() - radius * radius;
    const double disc = std::max(0.0, bq * bq - 4.0 * a * cq);
    return (-bq + std::sqrt(disc)) / (2.0 * a);
  };

  const int max_iter = 2 * n;
  for (int k = 0; k < max_iter; ++k) {
    const Vector Ap = A * p;
    const double curv = p.dot(Ap);
    if (curv <= 0.0) return u + to_boundary(u, p) * p;
    const double alpha = rr / curv;
    const Vector u_next = u + alpha * p;
    if (u_next.norm() >= radius) return u + to_boundary(u, p) * p;
    u = u_next;
    r -= alpha * Ap;
    const double rr_next = r.squaredNorm();
    if (std::sqrt(rr_next) <= 1e-12 * b.norm()) return u;
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  return u;
}

}  // namespace

Vector tangential_gradient_step(const NullBasis& Z, const Matrix& H, const Vector& g,
                                const Vector& w, double tilde, double kappa_fcd) {
  const int r = static_cast<int>(Z.Z.cols());
  if (r == 0 || tilde <= 0.0) return Vector::Zero(r);

  Matrix A = Z.Z.transpose() * H * Z.Z;
  A = 0.5 * (A + A.transpose());
  const Vector b = Z.Z.transpose() * (g + H * w);

  const double bound =
      cauchy_bound(b.norm(), spectral_norm(A), tilde, kappa_fcd);
  const double tol = 1e-12 * (1.0 + std::abs(bound));

  Vector u = r <= 200 ? solve_trs_exact(A, b, tilde) : solve_trs_steihaug(A, b, tilde);
  if (u.norm() > tilde) u *= tilde / u.norm();
  if (reduced_model_value(A, b, u) <= bound + tol) return u;

  u = cauchy_point(A, b, tilde);
  if (reduced_model_value(A, b, u) <= bound + tol) return u;
  throw CauchyCertificationFailure();
}

Vector tangential_eigen_step(const NullBasis& Z, const Matrix& H, const Vector& g,
                             const Vector& w, double tilde) {
  const auto [tau, zeta] = reduced_min_eigenpair(H, Z);
  (void)tau;
  Vector u = tilde * zeta;
  const double lin = (g + H * w).dot(Z.Z * u);
  if (lin > 0.0) u = -u;
  return u;
}

Vector soc_step(const ProblemModel& p, const Vector& x, const Vector& dx,
                const Matrix& G, const Vector& c) {
  const Vector c_trial = p.c(x + dx);
  if (!c_trial.allFinite()) throw EvaluationFailure("c");
  const Vector residual = c_trial - c - G * dx;
  return newton_normal_direction(G, residual);
}

StepKind choose_step_kind(double grad_L_full_norm, double delta, double H_norm,
                          double tau_plus, double c_norm) {
  const double h = std::max(H_norm, kHessNormFloor);
  const double lhs = grad_L_full_norm * std::min(delta, grad_L_full_norm / h);
  const double rhs = tau_plus * delta * (delta + c_norm);
  return lhs >= rhs ? StepKind::Gradient : StepKind::Eigen;
}

}  // namespace trssqp
