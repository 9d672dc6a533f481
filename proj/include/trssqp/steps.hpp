#pragma once

#include <optional>

#include "trssqp/linops.hpp"
#include "trssqp/problem.hpp"
#include "trssqp/types.hpp"

namespace trssqp {

enum class StepKind { Gradient, Eigen };

// Trust-region radius decomposed into a normal budget (breve) and a
// tangential budget (tilde), with breve^2 + tilde^2 = delta^2. Both splits
// rescale the residuals by ||G|| and ||H|| so the decomposition is invariant
// under positive scaling of the objective or the constraints.
struct RadiusSplit {
  double breve = 0.0;
  double tilde = 0.0;
  StepKind kind = StepKind::Gradient;
};

struct StepBundle {
  StepKind kind = StepKind::Gradient;
  RadiusSplit split;
  Vector w;                 // normal step
  double gamma_bar = 1.0;   // shrink factor applied to the Newton direction
  Vector u;                 // tangential coefficients in the Z basis
  Vector t;                 // Z * u
  Vector dx;                // w + t
  std::optional<Vector> soc;
  double pred = 0.0;        // filled by the merit update
};

// Guard substituted for ||H|| in divisions when the Hessian model vanishes.
inline constexpr double kHessNormFloor = 1e-12;

/// Splits the radius between normal and tangential budgets. grad_L is the
/// x-part of the estimated Lagrangian gradient; for EigenSplit the tangential
/// residual is tau_plus instead. A joint rescaled residual below 1e-14
/// yields the degenerate (0, 0) split.
RadiusSplit split_radius(double delta, const Vector& c, double G_norm,
                         const Vector& grad_L, double H_norm, double tau_plus,
                         StepKind kind);

/// w = gamma_bar * v with gamma_bar = min(breve / ||v||, 1); v = 0 gives
/// gamma_bar = 1.
std::pair<Vector, double> normal_step(const Vector& v, double breve);

/// Tangential step for gradient iterations: solves the reduced trust-region
/// subproblem min 0.5 u'Z'HZu + (g + Hw)'Zu over ||u|| <= tilde, certifying a
/// kappa_fcd fraction of the Cauchy reduction. Dense eigensolve up to reduced
/// dimension 200, Steihaug CG above, explicit Cauchy point as fallback.
Vector tangential_gradient_step(const NullBasis& Z, const Matrix& H, const Vector& g,
                                const Vector& w, double tilde, double kappa_fcd);

/// Tangential step for eigen iterations: +-tilde times the unit minimum
/// eigenvector of Z'HZ, sign chosen so the linear term is nonpositive
/// (ties resolve to +).
Vector tangential_eigen_step(const NullBasis& Z, const Matrix& H, const Vector& g,
                             const Vector& w, double tilde);

/// Second-order correction -G'(GG')^{-1} (c(x + dx) - c - G dx); evaluates
/// the constraints once at x + dx.
Vector soc_step(const ProblemModel& p, const Vector& x, const Vector& dx,
                const Matrix& G, const Vector& c);

/// Gradient step iff ||grad_L_full|| min(delta, ||grad_L_full|| / ||H||)
/// >= tau_plus * delta * (delta + ||c||); ties give Gradient.
StepKind choose_step_kind(double grad_L_full_norm, double delta, double H_norm,
                          double tau_plus, double c_norm);

/// Model value m(u) = 0.5 u'Au + b'u of the reduced subproblem; used by the
/// certification path and exposed for tests.
double reduced_model_value(const Matrix& A, const Vector& b, const Vector& u);

/// Explicit Cauchy point of the reduced subproblem (minimizer along -b).
Vector cauchy_point(const Matrix& A, const Vector& b, double radius);

}  // namespace trssqp
