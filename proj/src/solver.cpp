#include "trssqp/solver.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "trssqp/errors.hpp"

namespace trssqp {

HessianStrategy hessian_strategy_from_string(const std::string& s) {
  if (s == "id") return HessianStrategy::Id;
  if (s == "sr1") return HessianStrategy::SR1;
  if (s == "esth") return HessianStrategy::EstH;
  if (s == "aveh") return HessianStrategy::AveH;
  throw ConfigError("unknown hessian strategy: " + s);
}

std::string to_string(HessianStrategy s) {
  switch (s) {
    case HessianStrategy::Id: return "id";
    case HessianStrategy::SR1: return "sr1";
    case HessianStrategy::EstH: return "esth";
    case HessianStrategy::AveH: return "aveh";
  }
  return "id";
}

HessianModel::HessianModel(HessianStrategy strategy, int dim, int window)
    : strategy_(strategy), window_(window), sr1_H_(Matrix::Identity(dim, dim)) {}

HessianModel::Output HessianModel::evaluate(const Vector& x, const Vector& lambda,
                                            const TrueEval& truth, const NullBasis& basis,
                                            int alpha, double delta, const ProblemModel& p,
                                            const OracleConfig& cfg, Rng& rng) {
  Output out;
  switch (strategy_) {
    case HessianStrategy::Id:
      out.H = Matrix::Identity(p.dim, p.dim);
      break;
    case HessianStrategy::SR1:
      out.H = sr1_H_;
      break;
    case HessianStrategy::EstH:
    case HessianStrategy::AveH: {
      // One single oracle sample per iteration, plus the exact constraint
      // Hessians weighted by the current multiplier estimate.
      OracleConfig single = cfg;
      single.mode = EstimationMode::DirectInject;
      const auto est = estimate_hessian(x, delta, p, single, rng);
      out.has_oracle_error = true;
      out.oracle_error = est.true_error;
      out.n_samples = est.n_samples;
      Matrix lagr = est.value;
      for (int i = 0; i < p.n_eq; ++i) lagr += lambda(i) * truth.hess_c[i];
      if (strategy_ == HessianStrategy::EstH) {
        out.H = lagr;
      } else {
        ave_window_.push_back(lagr);
        if (static_cast<int>(ave_window_.size()) > window_) ave_window_.pop_front();
        Matrix sum = Matrix::Zero(p.dim, p.dim);
        for (const Matrix& Hi : ave_window_) sum += Hi;
        out.H = sum / static_cast<double>(ave_window_.size());
      }
      break;
    }
  }

  if (alpha == 1 && p.dim > p.n_eq) {
    out.tau_bar = reduced_min_eigenpair(out.H, basis).first;
    out.tau_plus = std::abs(std::min(out.tau_bar, 0.0));
  }
  return out;
}

void HessianModel::update_sr1(const Vector& dx, const Vector& grad_L_new,
                              const Vector& grad_L_old) {
  if (strategy_ != HessianStrategy::SR1) return;
  if (dx.norm() == 0.0) return;
  const Vector y = grad_L_new - grad_L_old;
  const Vector resid = y - sr1_H_ * dx;
  const double denom = resid.dot(dx);
  if (std::abs(denom) <= 1e-8 * resid.norm() * dx.norm()) return;  // skip rule
  sr1_H_ += (resid * resid.transpose()) / denom;
}

namespace {

double operator_norm(const Matrix& G) {
  Eigen::JacobiSVD<Matrix> svd(G);
  return svd.singularValues()(0);
}

void validate(const ProblemModel& p, const OracleConfig& ocfg, const SolverConfig& scfg) {
  if (scfg.alpha != 0 && scfg.alpha != 1) throw ConfigError("alpha must be 0 or 1");
  if (scfg.gamma <= 1.0) throw ConfigError("gamma must exceed 1");
  if (scfg.merit.rho <= 1.0) throw ConfigError("rho must exceed 1");
  if (scfg.merit.eta <= 0.0 || scfg.merit.eta >= 1.0) throw ConfigError("eta must lie in (0,1)");
  if (scfg.merit.kappa_fcd <= 0.0 || scfg.merit.kappa_fcd > 1.0)
    throw ConfigError("kappa_fcd must lie in (0,1]");
  if (scfg.merit.mu0 <= 0.0) throw ConfigError("mu0 must be positive");
  if (scfg.delta0 <= 0.0 || scfg.delta0 > scfg.delta_max)
    throw ConfigError("need 0 < delta0 <= delta_max");
  if (scfg.soc_trigger <= 0.0) throw ConfigError("SOC trigger r must be positive");
  if (scfg.eps_stop <= 0.0) throw ConfigError("eps_stop must be positive");
  if (ocfg.eps_f_tilde > ocfg.eps_f) throw ConfigError("eps_f_tilde must not exceed eps_f");
  for (double prob : {ocfg.p_f, ocfg.p_g, ocfg.p_h})
    if (prob <= 0.0 || prob >= 1.0) throw ConfigError("failure probabilities must lie in (0,1)");
  if (ocfg.mode == EstimationMode::SampleAverage &&
      (ocfg.C_f <= 0.0 || ocfg.C_g <= 0.0 || ocfg.C_h <= 0.0))
    throw ConfigError("sample-size constants must be positive in SampleAverage mode");
  if (ocfg.n_max < 1) throw ConfigError("n_max must be at least 1");
  if (p.n_eq >= p.dim && p.n_eq != 0) throw ConfigError("problem must satisfy m < d");
}

struct IterateState {
  long k = 0;
  Vector x;
  double delta = 0.0;
  double mu = 0.0;
  bool prev_accepted = false;
  Vector prev_x;
  Vector prev_grad_x_L;
};

// One full iteration: oracles, trial step, merit update, acceptance cases,
// radius update. True residuals at x_k are supplied by the caller, which has
// already evaluated them for the stopping check.
IterationLog iterate_once(IterateState& st, HessianModel& hess, const ProblemModel& p,
                          const OracleConfig& ocfg, const SolverConfig& scfg, Rng& rng,
                          double kkt_true, double tau_plus_true, RunRecord& rec) {
  IterationLog log;
  log.k = st.k;
  log.x = st.x;
  log.kkt_true = kkt_true;
  log.tau_plus_true = tau_plus_true;
  log.delta = st.delta;

  const TrueEval truth = eval_true(p, st.x);
  rec.constraint_evals += 1;
  if (is_rank_deficient(truth.G)) throw RankDeficientJacobian();
  const NullBasis basis = nullspace_basis(truth.G);
  const double c_norm = truth.c.norm();
  const double G_norm = operator_norm(truth.G);

  // Gradient oracle, multiplier, Lagrangian gradient.
  const auto gest = estimate_gradient(st.x, st.delta, scfg.alpha, p, ocfg, rng);
  const Vector& gbar = gest.value;
  const Vector lambda = least_squares_multiplier(truth.G, gbar);
  const Vector grad_x_L = gbar + truth.G.transpose() * lambda;
  const double grad_L_full_norm = std::hypot(grad_x_L.norm(), c_norm);

  // SR1 consumes the newly estimated Lagrangian gradient at the new iterate.
  if (st.k > 0 && st.prev_accepted)
    hess.update_sr1(st.x - st.prev_x, grad_x_L, st.prev_grad_x_L);

  const auto hout = hess.evaluate(st.x, lambda, truth, basis, scfg.alpha, st.delta, p,
                                  ocfg, rng);
  const double H_norm = spectral_norm(hout.H);

  // Trial step: kind criterion, radius split, normal and tangential parts.
  StepBundle step;
  step.kind = choose_step_kind(grad_L_full_norm, st.delta, H_norm, hout.tau_plus, c_norm);
  step.split =
      split_radius(st.delta, truth.c, G_norm, grad_x_L, H_norm, hout.tau_plus, step.kind);
  std::tie(step.w, step.gamma_bar) =
      normal_step(newton_normal_direction(truth.G, truth.c), step.split.breve);
  if (step.kind == StepKind::Gradient) {
    step.u = tangential_gradient_step(basis, hout.H, gbar, step.w, step.split.tilde,
                                      scfg.merit.kappa_fcd);
  } else {
    step.u = tangential_eigen_step(basis, hout.H, gbar, step.w, step.split.tilde);
  }
  step.t = basis.Z * step.u;
  step.dx = step.w + step.t;
  const Vector& dx = step.dx;

  // Merit escalation, then the estimated reductions.
  const auto [mu_new, pred_value] =
      update_merit_param(gbar, hout.H, dx, truth.c, truth.G, grad_L_full_norm, H_norm,
                         hout.tau_plus, st.delta, st.mu, scfg.merit);
  st.mu = mu_new;
  step.pred = pred_value;

  const auto fest_k = estimate_value(st.x, st.delta, scfg.alpha, p, ocfg, rng);
  Vector x_s = st.x + dx;
  Vector c_s = p.c(x_s);
  rec.constraint_evals += 1;
  if (!c_s.allFinite()) throw EvaluationFailure("c");
  auto fest_s = estimate_value(x_s, st.delta, scfg.alpha, p, ocfg, rng);
  double ared_value = ared(fest_s.value, fest_k.value, c_s, truth.c, st.mu);
  bool accepted = accept_step(ared_value, pred_value, scfg.alpha, ocfg.eps_f, ocfg.eps_g,
                              scfg.merit.eta);

  log.errors.err_g = gest.true_error;
  log.errors.err_f_k = fest_k.true_error;
  log.errors.err_f_s = fest_s.true_error;
  log.errors.has_hessian_error = hout.has_oracle_error;
  log.errors.err_h = hout.oracle_error;
  log.errors.hbar_norm = H_norm;
  long n_samples = gest.n_samples + fest_k.n_samples + fest_s.n_samples + hout.n_samples;

  // Rejected second-order-mode steps near the feasible set get one retry
  // with a second-order correction appended.
  if (!accepted && scfg.alpha == 1 && c_norm <= scfg.soc_trigger && scfg.soc_enabled) {
    const Vector d = soc_step(p, st.x, dx, truth.G, truth.c);
    step.soc = d;
    rec.constraint_evals += 1;
    rec.soc_evals += 1;
    const Vector x_soc = st.x + dx + d;
    const Vector c_soc = p.c(x_soc);
    rec.constraint_evals += 1;
    if (!c_soc.allFinite()) throw EvaluationFailure("c");
    const auto fest_soc = estimate_value(x_soc, st.delta, scfg.alpha, p, ocfg, rng);
    const double ared_soc = ared(fest_soc.value, fest_k.value, c_soc, truth.c, st.mu);
    log.soc_performed = true;
    log.errors.soc_regenerated = true;
    log.errors.err_f_s_soc = fest_soc.true_error;
    n_samples += fest_soc.n_samples;
    if (accept_step(ared_soc, pred_value, scfg.alpha, ocfg.eps_f, ocfg.eps_g,
                    scfg.merit.eta)) {
      accepted = true;
      x_s = x_soc;
      ared_value = ared_soc;
    }
  }

  const bool cond_b =
      radius_growth_test(grad_L_full_norm, H_norm, hout.tau_plus, scfg.merit.eta, st.delta);

  st.prev_accepted = accepted;
  st.prev_x = st.x;
  st.prev_grad_x_L = grad_x_L;
  if (accepted) {
    st.x = x_s;
    st.delta = cond_b ? std::min(scfg.gamma * st.delta, scfg.delta_max)
                      : st.delta / scfg.gamma;
  } else {
    st.delta = st.delta / scfg.gamma;
  }
  st.k += 1;

  log.step_kind = step.kind;
  log.accepted = accepted;
  log.cond_b = cond_b;
  log.radius_grew = accepted && cond_b;
  log.pred_nonnegative = pred_value >= 0.0;
  log.pred = pred_value;
  log.ared = ared_value;
  log.mu = st.mu;
  log.n_samples = n_samples;
  log.grad_L_full_norm = grad_L_full_norm;
  log.c_norm = c_norm;
  log.hbar_norm = H_norm;
  log.tau_plus_bar = hout.tau_plus;
  log.threshold_rhs = merit_threshold(grad_L_full_norm, H_norm, hout.tau_plus, log.delta,
                                      c_norm, scfg.merit.kappa_fcd);
  return log;
}

}  // namespace

RunRecord run(const ProblemModel& p, const OracleConfig& oracle_cfg,
              const SolverConfig& solver_cfg, std::uint64_t seed) {
  validate(p, oracle_cfg, solver_cfg);

  RunRecord rec;
  rec.problem = p.name;
  rec.solver_cfg = solver_cfg;
  rec.oracle_cfg = oracle_cfg;
  rec.seed = seed;
  rec.failure_mass_warning = oracle_cfg.failure_mass_violated();

  Rng rng(seed);
  IterateState st;
  st.x = p.x0;
  st.delta = solver_cfg.delta0;
  st.mu = solver_cfg.merit.mu0;
  HessianModel hess(solver_cfg.hessian, p.dim, solver_cfg.ave_window);

  auto stationary = [&](double kkt, double tau_plus) {
    return solver_cfg.alpha == 0 ? kkt <= solver_cfg.eps_stop
                                 : std::max(kkt, tau_plus) <= solver_cfg.eps_stop;
  };

  try {
    for (long k = 0; k <= solver_cfg.max_iter; ++k) {
      const auto [kkt, tau_plus] = kkt_residual_true(p, st.x);
      rec.final_kkt = kkt;
      rec.final_tau_plus = tau_plus;
      if (stationary(kkt, tau_plus)) {
        rec.stopping_time = k;
        rec.status = RunStatus::Stopped;
        break;
      }
      if (k == solver_cfg.max_iter) {
        rec.status = RunStatus::BudgetExhausted;
        break;
      }
      rec.logs.push_back(iterate_once(st, hess, p, oracle_cfg, solver_cfg, rng, kkt,
                                      tau_plus, rec));
    }
  } catch (const SolverError& e) {
    rec.status = RunStatus::Error;
    rec.error_kind = e.what();
  }
  rec.final_x = st.x;

  // Post-hoc accuracy events. The alpha = 0 Hessian event uses the configured
  // kappa_B, or 1 + the largest observed ||H_bar|| when none is supplied.
  double max_h = 0.0;
  for (const auto& log : rec.logs) max_h = std::max(max_h, log.hbar_norm);
  rec.kappa_B_empirical = max_h;
  rec.kappa_B_used = solver_cfg.kappa_B > 0.0 ? solver_cfg.kappa_B : 1.0 + max_h;
  for (auto& log : rec.logs) {
    const int alpha_eff = log.errors.has_hessian_error ? solver_cfg.alpha : 0;
    const AccuracyEvents ev =
        accuracy_events(log.errors, log.delta, alpha_eff, oracle_cfg, rec.kappa_B_used);
    log.A_k = ev.A;
    log.B_k = ev.B;
    log.C_k = ev.C;
    log.I_k = ev.accurate();
  }
  return rec;
}

}  // namespace trssqp
