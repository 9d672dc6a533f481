#pragma once

#include <utility>

#include "trssqp/types.hpp"

namespace trssqp {

struct MeritConfig {
  double mu0 = 1.0;        // initial merit parameter
  double rho = 1.2;        // escalation factor
  double eta = 0.4;        // acceptance ratio
  double kappa_fcd = 1.0;  // Cauchy fraction
  double mu_max = 1e10;    // safeguard cap on the escalation ladder
};

/// Predicted reduction of the l2 merit function:
/// g'dx + 0.5 dx'H dx + mu (||c + G dx|| - ||c||).
double pred(const Vector& g, const Matrix& H, const Vector& dx, const Vector& c,
            const Matrix& G, double mu);

/// Right-hand side of the merit threshold:
/// -(kappa_fcd/2) max(||grad_L|| min(delta, ||grad_L||/||H||),
///                    tau_plus delta (delta + ||c||)).
double merit_threshold(double grad_L_full_norm, double H_norm, double tau_plus,
                       double delta, double c_norm, double kappa_fcd);

/// Escalates mu by factors of rho until pred meets the threshold; returns the
/// final (mu, pred). Throws MeritEscalationFailure past cfg.mu_max.
std::pair<double, double> update_merit_param(const Vector& g, const Matrix& H,
                                             const Vector& dx, const Vector& c,
                                             const Matrix& G, double grad_L_full_norm,
                                             double H_norm, double tau_plus,
                                             double delta, double mu_in,
                                             const MeritConfig& cfg);

/// Estimated actual reduction f_s - f_k + mu (||c_s|| - ||c_k||).
double ared(double f_s, double f_k, const Vector& c_s, const Vector& c_k, double mu);

/// Relaxation term: 2 eps_f for alpha = 0, 2 eps_f + eps_g^{3/2} for alpha = 1.
double acceptance_relaxation(int alpha, double eps_f, double eps_g);

/// True iff (ared - theta_alpha) / pred >= eta; pred >= 0 rejects outright.
bool accept_step(double ared_value, double pred_value, int alpha, double eps_f,
                 double eps_g, double eta);

/// Radius growth test max(||grad_L|| / max(1, ||H||), tau_plus) >= eta delta.
bool radius_growth_test(double grad_L_full_norm, double H_norm, double tau_plus,
                        double eta, double delta);

}  // namespace trssqp
