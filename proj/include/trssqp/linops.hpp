#pragma once

#include <utility>

#include "trssqp/types.hpp"

namespace trssqp {

// Orthonormal basis of ker(G) for a full-row-rank m x d Jacobian G.
// Satisfies Z^T Z = I and G Z = 0 up to factorization roundoff.
struct NullBasis {
  Matrix Z;         // d x (d - m), orthonormal columns
  int source_rank;  // m of the originating Jacobian
};

// Relative singular-value threshold below which G is declared rank deficient.
inline constexpr double kRankTolerance = 1e-10;

/// Orthonormal null-space basis of G via Householder QR of G^T.
/// Throws RankDeficientJacobian; deterministic for a fixed G.
NullBasis nullspace_basis(const Matrix& G);

/// Least-squares multiplier -(G G^T)^{-1} G g.
Vector least_squares_multiplier(const Matrix& G, const Vector& g);

/// Minimum-norm solution v of c + G v = 0, i.e. -G^T (G G^T)^{-1} c.
Vector newton_normal_direction(const Matrix& G, const Vector& c);

/// Smallest eigenvalue and unit eigenvector of Z^T H Z.
/// Throws EmptyNullSpace when Z has zero columns.
std::pair<double, Vector> reduced_min_eigenpair(const Matrix& H, const NullBasis& Z);

/// Operator 2-norm of a symmetric matrix (max |eigenvalue|); 0x0 gives 0.
double spectral_norm(const Matrix& H);

/// True if the smallest singular value of G is <= kRankTolerance times the largest.
bool is_rank_deficient(const Matrix& G);

}  // namespace trssqp
