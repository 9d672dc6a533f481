#include "trssqp/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "trssqp/errors.hpp"
#include "trssqp/linops.hpp"

namespace trssqp {

namespace {

double rademacher(Rng& rng) {
  return (rng() & 1u) ? 1.0 : -1.0;
}

}  // namespace

double NoiseModel::draw(Rng& rng) const {
  switch (family) {
    case NoiseFamily::None:
      return 0.0;
    case NoiseFamily::Gaussian: {
      std::normal_distribution<double> dist(0.0, 1.0);
      return dist(rng);
    }
    case NoiseFamily::StudentT: {
      std::student_t_distribution<double> dist(4.0);
      return dist(rng);
    }
    case NoiseFamily::LogNormalSym: {
      std::lognormal_distribution<double> dist(0.0, 1.0);
      return rademacher(rng) * dist(rng);
    }
    case NoiseFamily::WeibullSym: {
      std::weibull_distribution<double> dist(1.0, 1.0);
      return rademacher(rng) * dist(rng);
    }
  }
  return 0.0;
}

NoiseFamily noise_family_from_string(const std::string& s) {
  if (s == "none") return NoiseFamily::None;
  if (s == "normal" || s == "gaussian") return NoiseFamily::Gaussian;
  if (s == "t4" || s == "student-t") return NoiseFamily::StudentT;
  if (s == "lognormal") return NoiseFamily::LogNormalSym;
  if (s == "weibull") return NoiseFamily::WeibullSym;
  throw ConfigError("unknown noise family: " + s);
}

std::string to_string(NoiseFamily f) {
  switch (f) {
    case NoiseFamily::None: return "none";
    case NoiseFamily::Gaussian: return "normal";
    case NoiseFamily::StudentT: return "t4";
    case NoiseFamily::LogNormalSym: return "lognormal";
    case NoiseFamily::WeibullSym: return "weibull";
  }
  return "none";
}

long sample_size(OracleOrder order, double delta, int alpha, const OracleConfig& cfg) {
  double numer = 0.0;
  double denom = 0.0;
  switch (order) {
    case OracleOrder::Second: {
      const double acc = cfg.eps_h + cfg.kappa_h * delta;
      numer = cfg.C_h;
      denom = cfg.p_h * acc * acc;
      break;
    }
    case OracleOrder::First: {
      const double acc = cfg.eps_g + cfg.kappa_g * std::pow(delta, alpha + 1);
      numer = cfg.C_g;
      denom = cfg.p_g * acc * acc;
      break;
    }
    case OracleOrder::Zeroth: {
      const double acc = cfg.eps_f + cfg.kappa_f * std::pow(delta, alpha + 2);
      numer = cfg.C_f;
      denom = cfg.p_f * acc * acc;
      // The mean-error arm only binds when a positive target is configured.
      if (cfg.eps_f_tilde > 0.0)
        denom = std::min(denom, cfg.eps_f_tilde * cfg.eps_f_tilde);
      break;
    }
  }
  if (denom <= 0.0) {
    if (cfg.mode == EstimationMode::SampleAverage) throw DegenerateOracle();
    return 1;
  }
  double n = std::ceil(numer / denom);
  n = std::min(n, static_cast<double>(cfg.n_max));
  return std::max(1L, static_cast<long>(n));
}

namespace {

// Mean of n unscaled draws (0 when the family is None, without touching rng).
double averaged_draw(const NoiseModel& noise, long n, Rng& rng) {
  if (noise.family == NoiseFamily::None) return 0.0;
  double sum = 0.0;
  for (long i = 0; i < n; ++i) sum += noise.draw(rng);
  return sum / static_cast<double>(n);
}

}  // namespace

Estimate<double> estimate_value(const Vector& x, double delta, int alpha,
                                const ProblemModel& p, const OracleConfig& cfg, Rng& rng) {
  const double truth = p.f(x);
  if (!std::isfinite(truth)) throw EvaluationFailure("f");

  const long n = cfg.mode == EstimationMode::SampleAverage
                     ? sample_size(OracleOrder::Zeroth, delta, alpha, cfg)
                     : 1;
  double value = truth + cfg.noise.sigma * averaged_draw(cfg.noise, n, rng);
  if (cfg.irreducible_injection) value += rademacher(rng) * cfg.eps_f;
  return {value, n, std::abs(value - truth)};
}

Estimate<Vector> estimate_gradient(const Vector& x, double delta, int alpha,
                                   const ProblemModel& p, const OracleConfig& cfg, Rng& rng) {
  const Vector truth = p.grad_f(x);
  if (!truth.allFinite()) throw EvaluationFailure("grad_f");

  const long n = cfg.mode == EstimationMode::SampleAverage
                     ? sample_size(OracleOrder::First, delta, alpha, cfg)
                     : 1;
  Vector value = truth;
  value.array() += cfg.noise.sigma * averaged_draw(cfg.noise, n, rng);
  if (cfg.irreducible_injection) {
    // Normalized all-ones direction: the injected norm is exactly eps_g.
    value.array() += rademacher(rng) * cfg.eps_g / std::sqrt(static_cast<double>(x.size()));
  }
  return {value, n, (value - truth).norm()};
}

Estimate<Matrix> estimate_hessian(const Vector& x, double delta,
                                  const ProblemModel& p, const OracleConfig& cfg, Rng& rng) {
  const Matrix truth = p.hess_f(x);
  if (!truth.allFinite()) throw EvaluationFailure("hess_f");

  const long n = cfg.mode == EstimationMode::SampleAverage
                     ? sample_size(OracleOrder::Second, delta, /*alpha=*/1, cfg)
                     : 1;
  Matrix value = truth;
  const int d = static_cast<int>(x.size());
  if (cfg.noise.family != NoiseFamily::None) {
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) {
        const double e = cfg.noise.sigma * averaged_draw(cfg.noise, n, rng);
        value(i, j) += e;
        if (j != i) value(j, i) += e;
      }
    }
  }
  if (cfg.irreducible_injection)
    value += rademacher(rng) * cfg.eps_h * Matrix::Identity(d, d);
  return {value, n, spectral_norm(Matrix(value - truth))};
}

AccuracyEvents accuracy_events(const IterationErrors& e, double delta, int alpha,
                               const OracleConfig& cfg, double kappa_B) {
  AccuracyEvents ev;
  if (alpha == 0) {
    ev.A = e.hbar_norm <= kappa_B;
  } else {
    if (!e.has_hessian_error) throw DiagnosticsUnavailable();
    ev.A = e.err_h <= cfg.eps_h + cfg.kappa_h * delta;
  }
  ev.B = e.err_g <= cfg.eps_g + cfg.kappa_g * std::pow(delta, alpha + 1);
  const double thr_f = cfg.eps_f + cfg.kappa_f * std::pow(delta, alpha + 2);
  ev.C = std::max(e.err_f_k, e.err_f_s) <= thr_f;
  if (e.soc_regenerated)
    ev.C = ev.C && std::max(e.err_f_k, e.err_f_s_soc) <= thr_f;
  return ev;
}

}  // namespace trssqp
