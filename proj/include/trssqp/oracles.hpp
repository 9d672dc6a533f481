#pragma once

#include <string>

#include "trssqp/problem.hpp"
#include "trssqp/types.hpp"

namespace trssqp {

enum class NoiseFamily { None, Gaussian, StudentT, LogNormalSym, WeibullSym };

// Scalar noise source. StudentT uses nu = 4 (finite variance, heavy tail);
// LogNormalSym and WeibullSym multiply each draw by an independent Rademacher
// sign so the noise is symmetric around zero.
struct NoiseModel {
  NoiseFamily family = NoiseFamily::Gaussian;
  double sigma = 1e-2;  // scale applied to every draw

  // One realization of `rand` (unscaled); consumes the generator.
  double draw(Rng& rng) const;
};

NoiseFamily noise_family_from_string(const std::string& s);
std::string to_string(NoiseFamily f);

enum class EstimationMode { DirectInject, SampleAverage };
enum class OracleOrder { Zeroth, First, Second };

struct OracleConfig {
  // Irreducible noise levels; eps_f_tilde bounds the mean absolute error and
  // must satisfy eps_f_tilde <= eps_f. A value of 0 disables that arm of the
  // zeroth-order sample-size rule (the mean condition cannot be met by any
  // finite sample when the target is exactly zero).
  double eps_f = 0.0;
  double eps_f_tilde = 0.0;
  double eps_g = 0.0;
  double eps_h = 0.0;

  // Adaptive accuracy constants multiplying powers of the radius.
  double kappa_f = 0.05;
  double kappa_g = 0.05;
  double kappa_h = 0.05;

  // Oracle failure probabilities.
  double p_f = 0.1;
  double p_g = 0.1;
  double p_h = 0.1;

  // Chebyshev sample-size constants.
  double C_f = 5.0;
  double C_g = 5.0;
  double C_h = 5.0;

  long n_max = 10000;  // per-estimate sample cap
  EstimationMode mode = EstimationMode::DirectInject;
  NoiseModel noise;
  bool irreducible_injection = false;

  // True when 1 - p_h - p_g - 2 p_f > 1/2 fails (accurate-iteration mass
  // below one half); callers may warn.
  bool failure_mass_violated() const { return 1.0 - p_h - p_g - 2.0 * p_f <= 0.5; }
};

// One oracle output. true_error records the deviation from the noiseless
// quantity for diagnostics only; solver decision logic never reads it.
template <typename Payload>
struct Estimate {
  Payload value;
  long n_samples = 1;
  double true_error = 0.0;
};

/// Sample count from the Chebyshev rule, capped at cfg.n_max and floored at 1.
/// Throws DegenerateOracle in SampleAverage mode when the denominator is zero.
long sample_size(OracleOrder order, double delta, int alpha, const OracleConfig& cfg);

/// Objective-value estimate at x.
Estimate<double> estimate_value(const Vector& x, double delta, int alpha,
                                const ProblemModel& p, const OracleConfig& cfg, Rng& rng);

/// Gradient estimate; the stochastic part adds the all-ones vector times one
/// scalar draw per sample, the irreducible part has norm exactly eps_g.
Estimate<Vector> estimate_gradient(const Vector& x, double delta, int alpha,
                                   const ProblemModel& p, const OracleConfig& cfg, Rng& rng);

/// Hessian estimate; independent entrywise noise mirrored for symmetry, the
/// irreducible part is eps_h times the identity (operator norm exactly eps_h).
Estimate<Matrix> estimate_hessian(const Vector& x, double delta,
                                  const ProblemModel& p, const OracleConfig& cfg, Rng& rng);

// Recorded true errors of one iteration, inputs to the accuracy events.
struct IterationErrors {
  bool has_hessian_error = false;
  double err_h = 0.0;       // ||estimated - true objective Hessian||
  double hbar_norm = 0.0;   // ||H_bar||, used for the alpha = 0 event
  double err_g = 0.0;
  double err_f_k = 0.0;
  double err_f_s = 0.0;
  bool soc_regenerated = false;
  double err_f_s_soc = 0.0;  // error of the re-estimated value after a SOC step
};

struct AccuracyEvents {
  bool A = false;
  bool B = false;
  bool C = false;  // includes the regenerated values when a SOC step occurred
  bool accurate() const { return A && B && C; }
};

/// Evaluates the per-iteration accuracy events from recorded true errors.
/// For alpha = 0 the second-order event is ||H_bar|| <= kappa_B.
AccuracyEvents accuracy_events(const IterationErrors& e, double delta, int alpha,
                               const OracleConfig& cfg, double kappa_B);

}  // namespace trssqp
