#pragma once

#include <span>

#include "rmstx/linkmath.hpp"

namespace rmstx {

// First-order surrogates used by the alternating optimizer.
//
// User k's rate splits as R_k = g1(F) - g2(F) in the lifted beam and as
// R_k = h1(p) - h2(p) in the powers, with
//   g1 = h1 = log2(sum_i p_i tr(F H_k) + s2),
//   g2 = h2 = log2(sum_{i!=k} p_i tr(F H_k) + s2).
// Both second terms are concave, so their tangent planes are global upper
// bounds. The spectral norm is convex, so its tangent plane is a global
// lower bound; together with tr(F) it forms the rank-one penalty.

// Expansion point (F^(r), p^(r)) of one outer iteration.
struct ScaExpansionPoint {
  CMatrix f_matrix;
  RVector powers;
};

struct PrincipalEigenpair {
  double value = 0.0;
  CVector vector;
};

// Largest eigenpair of a Hermitian matrix. Ties resolve deterministically to
// the first eigenvector in descending-eigenvalue order.
PrincipalEigenpair principal_eigenpair(const CMatrix& f_matrix);

// Re tr(A^H B)
double inner(const CMatrix& a, const CMatrix& b);

double g1(const CMatrix& f_matrix, int k, const RVector& powers,
          std::span<const UserChannel> channels, const LinkBudget& budget);
double g2(const CMatrix& f_matrix, int k, const RVector& powers,
          std::span<const UserChannel> channels, const LinkBudget& budget);

// Gradient of g2 at F^(r): (sum_{i!=k} p_i) H_k / ((sum_{i!=k} p_i tr(F^(r) H_k) + s2) ln 2)
CMatrix g2_gradient(const ScaExpansionPoint& at, int k, const RVector& powers,
                    std::span<const UserChannel> channels,
                    const LinkBudget& budget);
double g2_upper_bound(const CMatrix& f_matrix, const ScaExpansionPoint& at,
                      int k, const RVector& powers,
                      std::span<const UserChannel> channels,
                      const LinkBudget& budget);

// tr(F) - sigma_1(F); zero exactly for rank <= 1 PSD matrices.
double rank_one_gap(const CMatrix& f_matrix);
double spectral_norm(const CMatrix& f_matrix);

// ||F^(r)||_2 + tr(u u^H (F - F^(r))) with u the principal eigenvector of F^(r).
double spectral_norm_lower_bound(const CMatrix& f_matrix,
                                 const ScaExpansionPoint& at);

double h1(const RVector& powers, int k, const CMatrix& f_matrix,
          std::span<const UserChannel> channels, const LinkBudget& budget);
double h2(const RVector& powers, int k, const CMatrix& f_matrix,
          std::span<const UserChannel> channels, const LinkBudget& budget);

// d h2 / d p_i at p^(r); entry k is zero.
RVector h2_gradient(const ScaExpansionPoint& at, int k, const CMatrix& f_matrix,
                    std::span<const UserChannel> channels,
                    const LinkBudget& budget);
double h2_upper_bound(const RVector& powers, const ScaExpansionPoint& at, int k,
                      const CMatrix& f_matrix,
                      std::span<const UserChannel> channels,
                      const LinkBudget& budget);

}  // namespace rmstx
