#include "trssqp/linops.hpp"

#include <Eigen/Dense>

#include "trssqp/errors.hpp"

namespace trssqp {

bool is_rank_deficient(const Matrix& G) {
  if (G.rows() == 0) return false;
  Eigen::JacobiSVD<Matrix> svd(G);
  const auto& sv = svd.singularValues();
  return sv(sv.size() - 1) <= kRankTolerance * sv(0);
}

NullBasis nullspace_basis(const Matrix& G) {
  const int m = static_cast<int>(G.rows());
  const int d = static_cast<int>(G.cols());
  if (m >= d) throw EmptyNullSpace();
  if (is_rank_deficient(G)) throw RankDeficientJacobian();

  // Householder QR of G^T: the trailing d - m columns of Q span ker(G).
  Eigen::HouseholderQR<Matrix> qr(G.transpose());
  Matrix Q = qr.householderQ();
  return NullBasis{Q.rightCols(d - m), m};
}

namespace {

// Cholesky of G G^T, shared by the multiplier and normal-direction solves.
Eigen::LLT<Matrix> gram_factor(const Matrix& G) {
  if (is_rank_deficient(G)) throw RankDeficientJacobian();
  Eigen::LLT<Matrix> llt(Matrix(G * G.transpose()));
  if (llt.info() != Eigen::Success) throw RankDeficientJacobian();
  return llt;
}

}  // namespace

Vector least_squares_multiplier(const Matrix& G, const Vector& g) {
  return -gram_factor(G).solve(G * g);
}

Vector newton_normal_direction(const Matrix& G, const Vector& c) {
  return -G.transpose() * gram_factor(G).solve(c);
}

std::pair<double, Vector> reduced_min_eigenpair(const Matrix& H, const NullBasis& basis) {
  const int r = static_cast<int>(basis.Z.cols());
  if (r == 0) throw EmptyNullSpace();
  Matrix reduced = basis.Z.transpose() * H * basis.Z;
  reduced = 0.5 * (reduced + reduced.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(reduced);
  return {es.eigenvalues()(0), es.eigenvectors().col(0)};
}

double spectral_norm(const Matrix& H) {
  if (H.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace trssqp
