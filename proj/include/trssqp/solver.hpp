#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "trssqp/merit.hpp"
#include "trssqp/oracles.hpp"
#include "trssqp/problem.hpp"
#include "trssqp/steps.hpp"
#include "trssqp/types.hpp"

namespace trssqp {

enum class HessianStrategy { Id, SR1, EstH, AveH };

HessianStrategy hessian_strategy_from_string(const std::string& s);
std::string to_string(HessianStrategy s);

struct SolverConfig {
  int alpha = 0;  // 0: first-order stationarity, 1: second-order
  MeritConfig merit;
  double gamma = 1.5;      // radius growth/shrink factor
  double delta0 = 5.0;
  double delta_max = 5.0;
  double soc_trigger = 0.01;  // ||c_k|| threshold r for the SOC branch
  bool soc_enabled = true;    // ablation switch for the Case-2 branch
  HessianStrategy hessian = HessianStrategy::Id;
  int ave_window = 50;
  long max_iter = 100000;
  double eps_stop = 1e-4;  // epsilon of the stopping time
  // Hessian-norm bound for the alpha = 0 accuracy event; nonpositive means
  // "derive from this run" (1 + max ||H_bar|| observed, reported in the record).
  double kappa_B = 0.0;
};

// Per-iteration log. True residuals refer to the incumbent x_k before the
// step; radius and merit parameter are the values used in iteration k.
struct IterationLog {
  long k = 0;
  StepKind step_kind = StepKind::Gradient;
  bool soc_performed = false;
  bool accepted = false;     // condition (a) after any SOC retry
  bool radius_grew = false;  // accepted and condition (b)
  bool cond_b = false;
  bool pred_nonnegative = false;  // anomaly flag: escalated Pred was >= 0
  double pred = 0.0;
  double ared = 0.0;
  double kkt_true = 0.0;
  double tau_plus_true = 0.0;
  double delta = 0.0;
  double mu = 0.0;
  bool A_k = false, B_k = false, C_k = false, I_k = false;
  long n_samples = 0;

  // Quantities needed to re-verify the bookkeeping identities from the log.
  Vector x;  // incumbent iterate of this iteration
  double grad_L_full_norm = 0.0;
  double c_norm = 0.0;
  double hbar_norm = 0.0;
  double tau_plus_bar = 0.0;
  double threshold_rhs = 0.0;
  IterationErrors errors;
};

enum class RunStatus { Stopped, BudgetExhausted, Error };

struct RunRecord {
  std::vector<IterationLog> logs;
  long stopping_time = -1;  // -1 when the stopping set was never entered
  RunStatus status = RunStatus::BudgetExhausted;
  std::string error_kind;
  Vector final_x;
  double final_kkt = 0.0;
  double final_tau_plus = 0.0;
  std::string problem;
  SolverConfig solver_cfg;
  OracleConfig oracle_cfg;
  std::uint64_t seed = 0;
  double kappa_B_used = 0.0;       // bound applied to the alpha = 0 event
  double kappa_B_empirical = 0.0;  // max ||H_bar|| observed
  long constraint_evals = 0;
  long soc_evals = 0;
  // Set when 1 - p_h - p_g - 2 p_f <= 1/2 (accurate-iteration probability
  // mass below one half); informational only.
  bool failure_mass_warning = false;

  bool stopped() const { return status == RunStatus::Stopped; }
};

// Hessian model state carried across iterations (SR1 matrix, AveH window).
class HessianModel {
 public:
  HessianModel(HessianStrategy strategy, int dim, int window);

  struct Output {
    Matrix H;
    double tau_bar = 0.0;
    double tau_plus = 0.0;
    bool has_oracle_error = false;
    double oracle_error = 0.0;  // ||estimated - true objective Hessian||
    long n_samples = 0;
  };

  /// H_bar for the current iterate. For alpha = 1 the reduced minimum
  /// eigenvalue is computed; for alpha = 0 tau_plus is forced to 0.
  Output evaluate(const Vector& x, const Vector& lambda, const TrueEval& truth,
                  const NullBasis& basis, int alpha, double delta,
                  const ProblemModel& p, const OracleConfig& cfg, Rng& rng);

  /// SR1 post-step update; no-op unless the step was accepted and the
  /// curvature denominator passes the skip rule.
  void update_sr1(const Vector& dx, const Vector& grad_L_new, const Vector& grad_L_old);

 private:
  HessianStrategy strategy_;
  int window_;
  Matrix sr1_H_;
  std::deque<Matrix> ave_window_;
};

/// Iterates until the true-residual stopping rule, the budget, or an error.
/// Deterministic for fixed (problem, configs, seed).
RunRecord run(const ProblemModel& p, const OracleConfig& oracle_cfg,
              const SolverConfig& solver_cfg, std::uint64_t seed);

}  // namespace trssqp
