#include "trssqp/merit.hpp"

#include <algorithm>
#include <cmath>

#include "trssqp/errors.hpp"
#include "trssqp/steps.hpp"

namespace trssqp {

double pred(const Vector& g, const Matrix& H, const Vector& dx, const Vector& c,
            const Matrix& G, double mu) {
  const double quadratic = g.dot(dx) + 0.5 * dx.dot(H * dx);
  return quadratic + mu * ((c + G * dx).norm() - c.norm());
}

double merit_threshold(double grad_L_full_norm, double H_norm, double tau_plus,
                       double delta, double c_norm, double kappa_fcd) {
  const double h = std::max(H_norm, kHessNormFloor);
  const double grad_arm = grad_L_full_norm * std::min(delta, grad_L_full_norm / h);
  const double eigen_arm = tau_plus * delta * (delta + c_norm);
  return -0.5 * kappa_fcd * std::max(grad_arm, eigen_arm);
}

std::pair<double, double> update_merit_param(const Vector& g, const Matrix& H,
                                             const Vector& dx, const Vector& c,
                                             const Matrix& G, double grad_L_full_norm,
                                             double H_norm, double tau_plus,
                                             double delta, double mu_in,
                                             const MeritConfig& cfg) {
  const double rhs = merit_threshold(grad_L_full_norm, H_norm, tau_plus, delta,
                                     c.norm(), cfg.kappa_fcd);
  const double quadratic = g.dot(dx) + 0.5 * dx.dot(H * dx);
  const double c_change = (c + G * dx).norm() - c.norm();

  // Tiny relative slack so the exact-equality case (e.g. an interior Newton
  // step under H = I, where Pred equals the threshold) does not escalate.
  const double tol = 1e-12 * (1.0 + std::abs(rhs));
  double mu = mu_in;
  while (quadratic + mu * c_change > rhs + tol) {
    mu *= cfg.rho;
    if (mu > cfg.mu_max) throw MeritEscalationFailure(mu);
  }
  return {mu, quadratic + mu * c_change};
}

double ared(double f_s, double f_k, const Vector& c_s, const Vector& c_k, double mu) {
  return f_s - f_k + mu * (c_s.norm() - c_k.norm());
}

double acceptance_relaxation(int alpha, double eps_f, double eps_g) {
  return alpha == 0 ? 2.0 * eps_f : 2.0 * eps_f + std::pow(eps_g, 1.5);
}

bool accept_step(double ared_value, double pred_value, int alpha, double eps_f,
                 double eps_g, double eta) {
  if (pred_value >= 0.0) return false;
  const double theta = acceptance_relaxation(alpha, eps_f, eps_g);
  return (ared_value - theta) / pred_value >= eta;
}

bool radius_growth_test(double grad_L_full_norm, double H_norm, double tau_plus,
                        double eta, double delta) {
  const double lhs = std::max(grad_L_full_norm / std::max(1.0, H_norm), tau_plus);
  return lhs >= eta * delta;
}

}  // namespace trssqp
