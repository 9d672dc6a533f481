#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "trssqp/errors.hpp"
#include "trssqp/linops.hpp"
#include "trssqp/problem.hpp"
#include "trssqp/steps.hpp"

using namespace trssqp;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Matrix random_symmetric(int n, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
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

double cauchy_rhs(const Matrix& A, const Vector& b, double radius, double kappa) {
  double arm = radius;
  const double an = spectral_norm(A);
  if (an > 0.0) arm = std::min(arm, b.norm() / an);
  return -0.5 * kappa * b.norm() * arm;
}

}  // namespace

TEST_CASE("split_radius basics") {
  // Equal rescaled residuals split the radius evenly.
  Vector c(1);
  c << 1.0;
  const RadiusSplit even = split_radius(1.0, c, 1.0, vec2(1.0, 0.0), 1.0, 0.0,
                                        StepKind::Gradient);
  CHECK(even.breve == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(even.tilde == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(even.breve * even.breve + even.tilde * even.tilde ==
        doctest::Approx(1.0).epsilon(1e-10));

  // Zero infeasibility gives the whole budget to the tangential step.
  Vector c0 = Vector::Zero(1);
  const RadiusSplit feas = split_radius(2.0, c0, 1.0, vec2(3.0, 4.0), 2.0, 0.0,
                                        StepKind::Gradient);
  CHECK(feas.breve == 0.0);
  CHECK(feas.tilde == doctest::Approx(2.0).epsilon(1e-14));

  // Fully degenerate residuals give the zero split.
  const RadiusSplit zero = split_radius(1.0, c0, 1.0, Vector::Zero(2), 1.0, 0.0,
                                        StepKind::Gradient);
  CHECK(zero.breve == 0.0);
  CHECK(zero.tilde == 0.0);

  // Eigen split replaces the tangential residual with tau_plus.
  const RadiusSplit eig = split_radius(1.0, c0, 1.0, Vector::Zero(2), 1.0, 0.5,
                                       StepKind::Eigen);
  CHECK(eig.breve == 0.0);
  CHECK(eig.tilde == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("split_radius scale invariance") {
  Rng rng(31);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::uniform_real_distribution<double> log_scale(-3.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    Vector c = random_vector(2, rng);
    Vector grad = random_vector(4, rng);
    const double G_norm = 0.5 + std::abs(unif(rng));
    const double H_norm = 0.5 + std::abs(unif(rng));
    const double tau_plus = std::abs(unif(rng));
    for (StepKind kind : {StepKind::Gradient, StepKind::Eigen}) {
      const RadiusSplit base = split_radius(1.7, c, G_norm, grad, H_norm, tau_plus, kind);
      for (int si = 0; si < 10; ++si) {
        const double s = std::pow(10.0, log_scale(rng));
        // Objective scaling: (grad, H_norm, tau_plus) -> s * (...).
        const RadiusSplit obj = split_radius(1.7, c, G_norm, Vector(s * grad),
                                             s * H_norm, s * tau_plus, kind);
        CHECK(obj.breve == doctest::Approx(base.breve).epsilon(1e-12));
        CHECK(obj.tilde == doctest::Approx(base.tilde).epsilon(1e-12));
        // Constraint scaling: (c, G_norm) -> s * (...).
        const RadiusSplit con = split_radius(1.7, Vector(s * c), s * G_norm, grad,
                                             H_norm, tau_plus, kind);
        CHECK(con.breve == doctest::Approx(base.breve).epsilon(1e-12));
        CHECK(con.tilde == doctest::Approx(base.tilde).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("normal step shrinking") {
  const auto [w_in, g_in] = normal_step(vec2(-0.5, 0.0), 1.0);
  CHECK(g_in == 1.0);
  CHECK(w_in(0) == -0.5);

  const auto [w_cap, g_cap] = normal_step(vec2(-0.5, 0.0), 0.25);
  CHECK(g_cap == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(w_cap(0) == doctest::Approx(-0.25).epsilon(1e-14));

  const auto [w_zero, g_zero] = normal_step(Vector::Zero(2), 0.3);
  CHECK(g_zero == 1.0);
  CHECK(w_zero.norm() == 0.0);
}

TEST_CASE("tangential gradient step: 1-d exact solve") {
  // Reduced problem 0.5 u^2 - u over |u| <= 2: minimizer u = 1, value -0.5.
  Matrix G(1, 2);
  G << 0.0, 1.0;  // Z = e1
  const NullBasis basis = nullspace_basis(G);
  Matrix H = Matrix::Identity(2, 2);
  Vector g = vec2(-1.0, 0.0);
  // Z here may be -e1 depending on the QR sign; the reduced data adapts.
  const Vector u = tangential_gradient_step(basis, H, g, Vector::Zero(2), 2.0, 1.0);
  const Matrix A = basis.Z.transpose() * H * basis.Z;
  const Vector b = basis.Z.transpose() * g;
  CHECK(reduced_model_value(A, b, u) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(u.norm() == doctest::Approx(1.0).epsilon(1e-12));

  // Zero reduced gradient returns the zero step.
  const Vector u0 = tangential_gradient_step(basis, H, Vector::Zero(2),
                                             Vector::Zero(2), 2.0, 1.0);
  CHECK(u0.norm() <= 1e-14);
}

TEST_CASE("tangential gradient step: indefinite case against a grid oracle") {
  // d = 3, m = 1 so the reduced space is 2-d with Hessian diag(-1, 1).
  Matrix G(1, 3);
  G << 0.0, 0.0, 1.0;
  const NullBasis basis = nullspace_basis(G);
  Matrix H = Matrix::Zero(3, 3);
  // Build H so that Z' H Z = diag(-1, 1) in the Z columns' frame.
  H = basis.Z * (Matrix(2, 2) << -1.0, 0.0, 0.0, 1.0).finished() *
      basis.Z.transpose();
  Vector g = basis.Z * vec2(0.0, -1.0);

  const double tilde = 1.0;
  const Vector u = tangential_gradient_step(basis, H, g, Vector::Zero(3), tilde, 1.0);
  CHECK(u.norm() <= tilde * (1.0 + 1e-12));

  const Matrix A = basis.Z.transpose() * H * basis.Z;
  const Vector b = basis.Z.transpose() * g;
  const double value = reduced_model_value(A, b, u);
  CHECK(value <= cauchy_rhs(A, b, tilde, 1.0) + 1e-12);

  // 100 x 100 polar grid over the disk: the exact solver must match the best
  // grid value up to the grid resolution.
  double best = 0.0;
  for (int ir = 0; ir <= 100; ++ir) {
    const double r = tilde * ir / 100.0;
    for (int it = 0; it < 100; ++it) {
      const double th = 2.0 * M_PI * it / 100.0;
      const Vector cand = vec2(r * std::cos(th), r * std::sin(th));
      best = std::min(best, reduced_model_value(A, b, cand));
    }
  }
  CHECK(value <= best + 1e-3);
}

TEST_CASE("cauchy fuzz: every gradient step meets the reduction bound") {
  Rng rng(37);
  std::uniform_int_distribution<int> dims(2, 10);
  std::uniform_real_distribution<double> unif(0.05, 2.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = dims(rng);
    std::uniform_int_distribution<int> ms(1, d - 1);
    const int m = ms(rng);
    const Matrix G = random_full_rank(m, d, rng);
    const NullBasis basis = nullspace_basis(G);
    const Matrix H = random_symmetric(d, rng);
    const Vector g = random_vector(d, rng);
    const Vector w = 0.1 * random_vector(d, rng);
    const double tilde = unif(rng);
    const double kappa = 1.0;

    const Vector u = tangential_gradient_step(basis, H, g, w, tilde, kappa);
    CHECK(u.norm() <= tilde * (1.0 + 1e-10));
    const Matrix A = basis.Z.transpose() * H * basis.Z;
    const Vector b = basis.Z.transpose() * (g + H * w);
    const double value = reduced_model_value(A, b, u);
    CHECK(value <= cauchy_rhs(A, b, tilde, kappa) + 1e-10);
    // Never worse than the explicit Cauchy point.
    CHECK(value <= reduced_model_value(A, b, cauchy_point(A, b, tilde)) + 1e-12);
  }
}

TEST_CASE("eigen step: hand-computed reduced problem") {
  Matrix G(1, 3);
  G << 0.0, 0.0, 1.0;
  const NullBasis basis = nullspace_basis(G);
  const Matrix H = basis.Z * (Matrix(2, 2) << -1.0, 0.0, 0.0, 2.0).finished() *
                   basis.Z.transpose();
  const double tilde = 1.0;
  const Vector u = tangential_eigen_step(basis, H, Vector::Zero(3), Vector::Zero(3), tilde);
  const Matrix A = basis.Z.transpose() * H * basis.Z;
  CHECK(u.norm() == doctest::Approx(tilde).epsilon(1e-12));
  CHECK(u.dot(A * u) == doctest::Approx(-1.0).epsilon(1e-12));  // = -tau_plus tilde^2
}

TEST_CASE("eigen step fuzz: all three reduction conditions with kappa = 1") {
  Rng rng(41);
  std::uniform_int_distribution<int> dims(2, 10);
  std::uniform_real_distribution<double> unif(0.05, 2.0);
  int tested = 0;
  while (tested < 1000) {
    const int d = dims(rng);
    std::uniform_int_distribution<int> ms(1, d - 1);
    const int m = ms(rng);
    const Matrix G = random_full_rank(m, d, rng);
    const NullBasis basis = nullspace_basis(G);
    const Matrix H = random_symmetric(d, rng);
    const auto [tau, zeta] = reduced_min_eigenpair(H, basis);
    (void)zeta;
    if (tau >= -1e-3) continue;  // only negative-curvature instances
    const double tau_plus = -tau;
    const Vector g = random_vector(d, rng);
    const Vector w = 0.1 * random_vector(d, rng);
    const double tilde = unif(rng);

    const Vector u = tangential_eigen_step(basis, H, g, w, tilde);
    const Matrix A = basis.Z.transpose() * H * basis.Z;
    CHECK((g + H * w).dot(basis.Z * u) <= 1e-10);
    CHECK(u.norm() <= tilde * (1.0 + 1e-10));
    CHECK(u.dot(A * u) <= -tau_plus * tilde * tilde + 1e-10);
    ++tested;
  }
}

TEST_CASE("eigen step sign tie resolves to +") {
  Matrix G(1, 2);
  G << 0.0, 1.0;
  const NullBasis basis = nullspace_basis(G);
  Matrix H = Matrix::Zero(2, 2);
  H(0, 0) = -2.0;
  // Zero linear term: tie; the step keeps the eigenvector orientation.
  const Vector u = tangential_eigen_step(basis, H, Vector::Zero(2), Vector::Zero(2), 1.5);
  const auto [tau, zeta] = reduced_min_eigenpair(H, basis);
  (void)tau;
  CHECK((u - 1.5 * zeta).norm() <= 1e-14);
}

TEST_CASE("soc step: linear constraints give zero, quadratic hand case") {
  const ProblemModel lin = make_problem("quad-linear");
  Vector x = vec2(0.2, 0.1);
  const TrueEval e = eval_true(lin, x);
  const Vector d_lin = soc_step(lin, x, vec2(0.3, -0.4), e.G, e.c);
  CHECK(d_lin.norm() <= 1e-14);

  // c(x) = x1^2 + x2^2 - 1 at x = (1,0), dx = (0,t): d = (-t^2/2, 0).
  const ProblemModel circ = make_problem("maratos");
  x = vec2(1.0, 0.0);
  const TrueEval ec = eval_true(circ, x);
  const double t = 0.3;
  const Vector d = soc_step(circ, x, vec2(0.0, t), ec.G, ec.c);
  CHECK(d(0) == doctest::Approx(-t * t / 2.0).epsilon(1e-12));
  CHECK(d(1) == doctest::Approx(0.0));
}

TEST_CASE("soc step scales quadratically with the trial step") {
  const ProblemModel circ = make_problem("rosenbrock-sphere");
  Rng rng(43);
  Vector x = vec2(1.1, 0.9);
  const TrueEval e = eval_true(circ, x);
  const Vector dir = random_vector(2, rng).normalized();
  const Vector d1 = soc_step(circ, x, Vector(0.2 * dir), e.G, e.c);
  const Vector d2 = soc_step(circ, x, Vector(0.1 * dir), e.G, e.c);
  CHECK(d1.norm() / d2.norm() == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("corrupted subproblem data fails certification") {
  Matrix G(1, 3);
  G << 0.0, 0.0, 1.0;
  const NullBasis basis = nullspace_basis(G);
  Matrix H = Matrix::Zero(3, 3);
  H(0, 0) = std::numeric_limits<double>::quiet_NaN();
  Vector g(3);
  g << 1.0, -2.0, 0.5;
  CHECK_THROWS_AS(tangential_gradient_step(basis, H, g, Vector::Zero(3), 1.0, 1.0),
                  CauchyCertificationFailure);
}

TEST_CASE("step-kind criterion") {
  // tau_plus = 0 always selects the gradient step.
  CHECK(choose_step_kind(0.0, 1.0, 1.0, 0.0, 0.0) == StepKind::Gradient);
  // Zero Lagrangian gradient with curvature present selects the eigen step.
  CHECK(choose_step_kind(0.0, 1.0, 1.0, 1.0, 0.0) == StepKind::Eigen);
  // Hand-computed: left 1 * min(1, 1) = 1, right 0.1 * 1 * 2 = 0.2.
  CHECK(choose_step_kind(1.0, 1.0, 1.0, 0.1, 1.0) == StepKind::Gradient);
}

TEST_CASE("steihaug path certifies the same bound above dimension 200") {
  Rng rng(47);
  const int d = 220, m = 10;
  const Matrix G = random_full_rank(m, d, rng);
  const NullBasis basis = nullspace_basis(G);
  const Matrix H = random_symmetric(d, rng, 0.3);
  const Vector g = random_vector(d, rng);
  const double tilde = 1.3;
  const Vector u = tangential_gradient_step(basis, H, g, Vector::Zero(d), tilde, 1.0);
  const Matrix A = basis.Z.transpose() * H * basis.Z;
  const Vector b = basis.Z.transpose() * g;
  CHECK(u.norm() <= tilde * (1.0 + 1e-10));
  CHECK(reduced_model_value(A, b, u) <= cauchy_rhs(A, b, tilde, 1.0) + 1e-10);
}

TEST_CASE("step bundle invariants on random instances") {
  Rng rng(53);
  std::uniform_int_distribution<int> dims(2, 10);
  std::uniform_real_distribution<double> unif(0.1, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = dims(rng);
    std::uniform_int_distribution<int> ms(1, d - 1);
    const int m = ms(rng);
    const Matrix G = random_full_rank(m, d, rng);
    const NullBasis basis = nullspace_basis(G);
    const Matrix H = random_symmetric(d, rng);
    const Vector g = random_vector(d, rng);
    const Vector c = random_vector(m, rng);
    const double delta = unif(rng);

    Eigen::JacobiSVD<Matrix> svd(G);
    const double G_norm = svd.singularValues()(0);
    const double H_norm = spectral_norm(H);
    const Vector lambda = least_squares_multiplier(G, g);
    const Vector grad_L = g + G.transpose() * lambda;

    const RadiusSplit split =
        split_radius(delta, c, G_norm, grad_L, H_norm, 0.0, StepKind::Gradient);
    CHECK(split.breve * split.breve + split.tilde * split.tilde ==
          doctest::Approx(delta * delta).epsilon(1e-10));

    const auto [w, gamma] = normal_step(newton_normal_direction(G, c), split.breve);
    (void)gamma;
    CHECK(w.norm() <= split.breve * (1.0 + 1e-10));
    const Vector u = tangential_gradient_step(basis, H, g, w, split.tilde, 1.0);
    const Vector t = basis.Z * u;
    CHECK(u.norm() <= split.tilde * (1.0 + 1e-10));
    CHECK(std::abs(w.dot(t)) <= 1e-10 * std::max(1.0, w.norm() * t.norm()));
    CHECK((G * t).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + G.norm()));
    CHECK((w + t).norm() <= delta * (1.0 + 1e-9));
  }
}
