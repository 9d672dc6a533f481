// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line with the measured quantities.

#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "trssqp/bench.hpp"
#include "trssqp/errors.hpp"

using namespace trssqp;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(int criterion, bool ok, const std::string& detail) {
  std::printf("[criterion %d] %s - %s\n", criterion, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  CHECK(ok);
}

OracleConfig quiet() {
  OracleConfig cfg;
  cfg.noise.family = NoiseFamily::None;
  return cfg;
}

SolverConfig solver_cfg(int alpha, HessianStrategy h, double eps, long budget) {
  SolverConfig cfg;
  cfg.alpha = alpha;
  cfg.hessian = h;
  cfg.eps_stop = eps;
  cfg.max_iter = budget;
  return cfg;
}

std::vector<std::string> convergence_problems() {
  std::vector<std::string> keys;
  for (const auto& key : problem_catalog_keys())
    if (make_problem(key).convergence_suite) keys.push_back(key);
  return keys;
}

Matrix random_symmetric(int n, Rng& rng) {
  std::normal_distribution<double> dist;
  Matrix H(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) H(i, j) = H(j, i) = dist(rng);
  return H;
}

Matrix random_full_rank(int m, int d, Rng& rng) {
  std::normal_distribution<double> dist;
  while (true) {
    Matrix G(m, d);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < d; ++j) G(i, j) = dist(rng);
    if (!is_rank_deficient(G)) return G;
  }
}

Vector random_vector(int n, Rng& rng) {
  std::normal_distribution<double> dist;
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

// Shared pool of records for the bookkeeping criterion.
std::vector<RunRecord>& record_pool() {
  static std::vector<RunRecord> pool;
  return pool;
}

}  // namespace

TEST_CASE("criterion 1: deterministic convergence") {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  for (const auto& key : convergence_problems()) {
    const ProblemModel p = make_problem(key);
    const RunRecord first =
        run(p, quiet(), solver_cfg(0, HessianStrategy::EstH, 1e-6, 1000), 1);
    const RunRecord second =
        run(p, quiet(), solver_cfg(1, HessianStrategy::EstH, 1e-6, 1000), 1);
    record_pool().push_back(first);
    record_pool().push_back(second);
    const bool p_ok = first.stopped() && first.final_kkt <= 1e-6 && second.stopped() &&
                      second.final_kkt <= 1e-6 && second.final_tau_plus <= 1e-6;
    if (!p_ok) {
      ok = false;
      detail += key + " failed; ";
    }
  }
  const double elapsed = seconds_since(t0);
  ok = ok && elapsed < 10.0;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "alpha=0/1 reach 1e-6 on %zu problems in %.2f s (budget 10 s)",
                convergence_problems().size(), elapsed);
  report(1, ok, detail + buf);
}

TEST_CASE("criterion 2: first-order stopping-time scaling") {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentSpec spec = experiment_preset("stopping-time");
  std::vector<RunRecord> records;
  const ResultTable table = stopping_time_experiment(spec, &records);
  for (auto& rec : records) record_pool().push_back(std::move(rec));

  std::map<std::string, std::map<double, double>> medians;
  for (const auto& row : table.rows)
    if (row.seed == "median") medians[row.problem][row.eps] = row.T_eps;

  bool ok = medians.size() >= 3;
  std::string detail;
  for (const auto& [problem, by_eps] : medians) {
    std::vector<double> logt, logeps;
    for (const auto& [eps, t] : by_eps) {
      logeps.push_back(std::log10(eps));
      logt.push_back(std::log10(std::max(t, 1.0)));
    }
    // OLS slope of log T against log eps.
    const size_t n = logt.size();
    double mx = 0, my = 0;
    for (size_t i = 0; i < n; ++i) {
      mx += logeps[i];
      my += logt[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < n; ++i) {
      sxy += (logeps[i] - mx) * (logt[i] - my);
      sxx += (logeps[i] - mx) * (logeps[i] - mx);
    }
    const double slope = sxy / sxx;
    const double factor_per_decade = std::pow(10.0, -slope);
    const bool in_window = slope >= -2.5 && slope <= -0.5 && factor_per_decade >= 3.0 &&
                           factor_per_decade <= 100.0;
    char buf[120];
    std::snprintf(buf, sizeof(buf), "%s slope=%.2f factor/decade=%.1f; ", problem.c_str(),
                  slope, factor_per_decade);
    detail += buf;
    ok = ok && in_window;
  }
  const double elapsed = seconds_since(t0);
  ok = ok && elapsed < 300.0;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "elapsed %.1f s (budget 300 s)", elapsed);
  report(2, ok, detail + buf);
}

TEST_CASE("criterion 3: second-order behavior at the saddle") {
  const ProblemModel p = make_problem("saddle");
  const RunRecord second =
      run(p, quiet(), solver_cfg(1, HessianStrategy::EstH, 1e-3, 100000), 1);
  const RunRecord first =
      run(p, quiet(), solver_cfg(0, HessianStrategy::Id, 1e-3, 100000), 1);
  record_pool().push_back(second);
  record_pool().push_back(first);
  const bool ok = second.stopped() && second.final_tau_plus <= 1e-3 && first.stopped() &&
                  first.final_kkt <= 1e-3 && first.final_tau_plus >= 0.1;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "alpha=1 stops with tau+=%.1e; alpha=0 stops at the saddle with "
                "kkt=%.1e, tau+=%.2f",
                second.final_tau_plus, first.final_kkt, first.final_tau_plus);
  report(3, ok, buf);
}

TEST_CASE("criterion 4: Maratos stall without SOC, convergence with it") {
  const ProblemModel p = make_problem("maratos");
  SolverConfig with_soc = solver_cfg(1, HessianStrategy::EstH, 1e-6, 1000);
  const RunRecord enabled = run(p, quiet(), with_soc, 1);
  Vector minimizer(2);
  minimizer << 1.0, 0.0;
  const bool converged = enabled.stopped() &&
                         (enabled.final_x - minimizer).norm() <= 1e-4 &&
                         enabled.soc_evals > 0;

  SolverConfig without_soc = with_soc;
  without_soc.soc_enabled = false;
  without_soc.max_iter = 300;
  const RunRecord ablated = run(p, quiet(), without_soc, 1);
  long best_run = 0, current = 0;
  bool stagnated = true;
  for (size_t i = 1; i < ablated.logs.size(); ++i) {
    if (ablated.logs[i].delta < ablated.logs[i - 1].delta) {
      ++current;
      best_run = std::max(best_run, current);
    } else {
      current = 0;
    }
  }
  for (const auto& log : ablated.logs)
    stagnated = stagnated && (log.x - p.x0).norm() <= 1e-12;
  const bool stalled = !ablated.stopped() && best_run >= 50 && stagnated;

  record_pool().push_back(enabled);
  record_pool().push_back(ablated);
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "SOC run: T=%ld, |x-x*|=%.1e, soc_evals=%ld; ablation: %ld consecutive "
                "radius decreases at the saddle",
                enabled.stopping_time, (enabled.final_x - minimizer).norm(),
                enabled.soc_evals, best_run);
  report(4, converged && stalled, buf);
}

TEST_CASE("criterion 5: Cauchy and eigen-step reduction fuzz") {
  Rng rng(4242);
  std::uniform_int_distribution<int> dims(2, 10);
  std::uniform_real_distribution<double> unif(0.05, 2.0);
  const double kappa_fcd = 1.0;
  long gradient_checked = 0, eigen_checked = 0;
  bool ok = true;

  while (gradient_checked < 1000 || eigen_checked < 1000) {
    const int d = dims(rng);
    std::uniform_int_distribution<int> ms(1, d - 1);
    const int m = ms(rng);
    const Matrix G = random_full_rank(m, d, rng);
    const NullBasis basis = nullspace_basis(G);
    const Matrix H = random_symmetric(d, rng);
    const Vector g = random_vector(d, rng);
    const Vector w = 0.1 * random_vector(d, rng);
    const double tilde = unif(rng);
    const Matrix A = basis.Z.transpose() * H * basis.Z;
    const Vector b = basis.Z.transpose() * (g + H * w);

    if (gradient_checked < 1000) {
      ++gradient_checked;
      const Vector u = tangential_gradient_step(basis, H, g, w, tilde, kappa_fcd);
      double arm = tilde;
      const double an = spectral_norm(A);
      if (an > 0.0) arm = std::min(arm, b.norm() / an);
      const double bound = -0.5 * kappa_fcd * b.norm() * arm;
      ok = ok && u.norm() <= tilde * (1.0 + 1e-10) &&
           reduced_model_value(A, b, u) <= bound + 1e-10;
    }
    const auto [tau, zeta] = reduced_min_eigenpair(H, basis);
    (void)zeta;
    if (tau < -1e-3 && eigen_checked < 1000) {
      ++eigen_checked;
      const Vector u = tangential_eigen_step(basis, H, g, w, tilde);
      ok = ok && (g + H * w).dot(basis.Z * u) <= 1e-10 &&
           u.norm() <= tilde * (1.0 + 1e-10) &&
           u.dot(A * u) <= -(-tau) * tilde * tilde + 1e-10;
    }
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf), "%ld gradient and %ld eigen instances at tolerance 1e-10",
                gradient_checked, eigen_checked);
  report(5, ok, buf);
}

TEST_CASE("criterion 6: radius-split scale invariance") {
  Rng rng(31337);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::uniform_real_distribution<double> log_scale(-3.0, 3.0);
  bool ok = true;
  for (int trial = 0; trial < 100; ++trial) {
    const Vector c = random_vector(2, rng);
    const Vector grad = random_vector(5, rng);
    const double G_norm = 0.5 + std::abs(unif(rng));
    const double H_norm = 0.5 + std::abs(unif(rng));
    const double tau_plus = std::abs(unif(rng));
    for (StepKind kind : {StepKind::Gradient, StepKind::Eigen}) {
      const RadiusSplit base = split_radius(2.3, c, G_norm, grad, H_norm, tau_plus, kind);
      for (int si = 0; si < 10; ++si) {
        const double s = std::pow(10.0, log_scale(rng));
        const RadiusSplit obj =
            split_radius(2.3, c, G_norm, Vector(s * grad), s * H_norm, s * tau_plus, kind);
        const RadiusSplit con =
            split_radius(2.3, Vector(s * c), s * G_norm, grad, H_norm, tau_plus, kind);
        auto close = [](double a, double b) {
          return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b));
        };
        ok = ok && close(obj.breve, base.breve) && close(obj.tilde, base.tilde) &&
             close(con.breve, base.breve) && close(con.tilde, base.tilde);
      }
    }
  }
  report(6, ok, "100 inputs x 10 scales x both rescalings, relative tolerance 1e-12");
}

TEST_CASE("criterion 7: oracle calibration frequencies") {
  const ProblemModel p = make_problem("quad-linear");
  bool ok = true;
  std::string detail;
  for (NoiseFamily family : {NoiseFamily::Gaussian, NoiseFamily::StudentT}) {
    OracleConfig cfg;
    cfg.noise.family = family;
    cfg.noise.sigma = 1e-2;
    cfg.mode = EstimationMode::SampleAverage;
    // Default oracle constants; radii on the default ladder where the
    // Chebyshev sizes fit under the 1e4 cap.
    Rng rng(2025);
    const std::vector<double> deltas = {5.0, 5.0 / 1.5, 5.0 / 2.25, 5.0 / 3.375};
    long n_iter = 0, a_hits = 0, b_hits = 0, c_hits = 0;
    for (double delta : deltas) {
      for (int it = 0; it < 2500; ++it) {
        IterationErrors e;
        e.has_hessian_error = true;
        e.err_h = estimate_hessian(p.x0, delta, p, cfg, rng).true_error;
        e.err_g = estimate_gradient(p.x0, delta, 1, p, cfg, rng).true_error;
        e.err_f_k = estimate_value(p.x0, delta, 1, p, cfg, rng).true_error;
        e.err_f_s = estimate_value(p.x0, delta, 1, p, cfg, rng).true_error;
        const AccuracyEvents ev = accuracy_events(e, delta, 1, cfg, 1.0);
        ++n_iter;
        a_hits += ev.A;
        b_hits += ev.B;
        c_hits += ev.C;
      }
    }
    const double fa = static_cast<double>(a_hits) / n_iter;
    const double fb = static_cast<double>(b_hits) / n_iter;
    const double fc = static_cast<double>(c_hits) / n_iter;
    ok = ok && n_iter >= 10000 && fa >= 0.87 && fb >= 0.87 && fc >= 0.87;
    char buf[120];
    std::snprintf(buf, sizeof(buf), "%s: freq(A)=%.3f freq(B)=%.3f freq(C)=%.3f; ",
                  to_string(family).c_str(), fa, fb, fc);
    detail += buf;
  }
  report(7, ok, detail + "thresholds 0.87 over 1e4 iterations each");
}

TEST_CASE("criterion 8: irreducible-noise floor") {
  ExperimentSpec spec = experiment_preset("irreducible-default");
  spec.eps_grid = {1e-1, 1e-3};
  std::vector<RunRecord> records;
  const ResultTable table = stopping_time_experiment(spec, &records);
  for (auto& rec : records) record_pool().push_back(std::move(rec));

  bool all_converge_hi = true;
  std::map<std::string, int> exhausted_lo;
  bool has_stopped_flag = false, has_budget_flag = false;
  for (const auto& row : table.rows) {
    if (row.seed == "mean" || row.seed == "median") continue;
    if (row.eps == 1e-1) {
      all_converge_hi = all_converge_hi && row.status == "Stopped";
      has_stopped_flag = has_stopped_flag || row.status == "Stopped";
    } else {
      if (row.status == "BudgetExhausted") {
        exhausted_lo[row.problem]++;
        has_budget_flag = true;
      }
    }
  }
  const bool ok = all_converge_hi && !exhausted_lo.empty() && has_stopped_flag &&
                  has_budget_flag;
  std::string stalls;
  for (const auto& [prob, n] : exhausted_lo) {
    char buf[80];
    std::snprintf(buf, sizeof(buf), "%s (%d rows) ", prob.c_str(), n);
    stalls += buf;
  }
  report(8, ok,
         "all eps=1e-1 runs stopped; eps=1e-3 exhausted the budget on: " +
             (stalls.empty() ? std::string("none") : stalls));
}

TEST_CASE("criterion 9: bookkeeping over every logged run") {
  // Add noisy runs across strategies and both alphas to the pool.
  for (const char* prob : {"tilted-circle", "quad-3lin"}) {
    for (HessianStrategy h : {HessianStrategy::Id, HessianStrategy::SR1,
                              HessianStrategy::EstH, HessianStrategy::AveH}) {
      OracleConfig ocfg;
      ocfg.noise.family = NoiseFamily::LogNormalSym;
      ocfg.noise.sigma = 1e-2;
      record_pool().push_back(
          run(make_problem(prob), ocfg, solver_cfg(0, h, 1e-7, 200), 23));
    }
    OracleConfig ocfg;
    ocfg.noise.family = NoiseFamily::StudentT;
    ocfg.noise.sigma = 1e-2;
    record_pool().push_back(
        run(make_problem(prob), ocfg, solver_cfg(1, HessianStrategy::EstH, 1e-7, 200), 29));
  }

  bool mu_ok = true, radius_ok = true, threshold_ok = true, accept_ok = true;
  bool alpha0_ok = true;
  long runs = 0, iterations = 0;
  for (const auto& rec : record_pool()) {
    ++runs;
    double mu_prev = 0.0;
    for (size_t i = 0; i < rec.logs.size(); ++i) {
      const auto& log = rec.logs[i];
      ++iterations;
      mu_ok = mu_ok && log.mu >= mu_prev;
      mu_prev = log.mu;
      if (i > 0) {
        const double ratio = log.delta / rec.logs[i - 1].delta;
        const double gamma = rec.solver_cfg.gamma;
        const bool grew = std::abs(ratio - gamma) <= 1e-12;
        const bool shrank = std::abs(ratio - 1.0 / gamma) <= 1e-12;
        const bool capped = log.delta == rec.solver_cfg.delta_max;
        radius_ok = radius_ok && (grew || shrank || capped);
      }
      threshold_ok = threshold_ok &&
                     log.pred <= log.threshold_rhs + 1e-10 * (1.0 + std::abs(log.threshold_rhs));
      if (log.accepted) {
        const double theta = acceptance_relaxation(rec.solver_cfg.alpha,
                                                   rec.oracle_cfg.eps_f,
                                                   rec.oracle_cfg.eps_g);
        accept_ok = accept_ok && log.pred < 0.0 &&
                    log.ared - theta <= rec.solver_cfg.merit.eta * log.pred + 1e-12;
      }
      if (rec.solver_cfg.alpha == 0)
        alpha0_ok = alpha0_ok && log.step_kind == StepKind::Gradient && !log.soc_performed;
    }
    if (rec.solver_cfg.alpha == 0) alpha0_ok = alpha0_ok && rec.soc_evals == 0;
  }
  const bool ok = mu_ok && radius_ok && threshold_ok && accept_ok && alpha0_ok;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "%ld runs / %ld iterations: mu %s, radius %s, threshold %s, acceptance %s, "
                "alpha0 purity %s",
                runs, iterations, mu_ok ? "ok" : "VIOLATED",
                radius_ok ? "ok" : "VIOLATED", threshold_ok ? "ok" : "VIOLATED",
                accept_ok ? "ok" : "VIOLATED", alpha0_ok ? "ok" : "VIOLATED");
  report(9, ok, buf);
}
