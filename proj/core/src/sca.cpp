#include "rmstx/sca.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rmstx/channel.hpp"

namespace rmstx {
namespace {

void check_user(int k, const RVector& powers,
                std::span<const UserChannel> channels) {
  if (k < 0 || k >= static_cast<int>(channels.size()) ||
      powers.size() != static_cast<Eigen::Index>(channels.size()))
    throw std::invalid_argument("sca: bad user index or power vector size");
}

double interference_weight(int k, const RVector& powers) {
  return powers.sum() - powers[k];
}

}  // namespace

PrincipalEigenpair principal_eigenpair(const CMatrix& f_matrix) {
  // Ascending order from Eigen; the last column is the first in descending
  // order, which settles ties deterministically.
  const Eigen::SelfAdjointEigenSolver<CMatrix> eig(f_matrix);
  const Eigen::Index last = f_matrix.rows() - 1;
  return {eig.eigenvalues()[last], eig.eigenvectors().col(last)};
}

double inner(const CMatrix& a, const CMatrix& b) {
  return a.cwiseProduct(b.conjugate()).sum().real();
}

double g1(const CMatrix& f_matrix, int k, const RVector& powers,
          std::span<const UserChannel> channels, const LinkBudget& budget) {
  check_user(k, powers, channels);
  return std::log2(powers.sum() * lifted_gain(channels[k].coefficients, f_matrix) +
                   budget.noise_power);
}

double g2(const CMatrix& f_matrix, int k, const RVector& powers,
          std::span<const UserChannel> channels, const LinkBudget& budget) {
  check_user(k, powers, channels);
  return std::log2(interference_weight(k, powers) *
                       lifted_gain(channels[k].coefficients, f_matrix) +
                   budget.noise_power);
}

CMatrix g2_gradient(const ScaExpansionPoint& at, int k, const RVector& powers,
                    std::span<const UserChannel> channels,
                    const LinkBudget& budget) {
  check_user(k, powers, channels);
  const CVector& h = channels[k].coefficients;
  const double w = interference_weight(k, powers);
  const double denom =
      (w * lifted_gain(h, at.f_matrix) + budget.noise_power) * std::numbers::ln2;
  return (w / denom) * (h * h.adjoint());
}

double g2_upper_bound(const CMatrix& f_matrix, const ScaExpansionPoint& at,
                      int k, const RVector& powers,
                      std::span<const UserChannel> channels,
                      const LinkBudget& budget) {
  const CMatrix grad = g2_gradient(at, k, powers, channels, budget);
  return g2(at.f_matrix, k, powers, channels, budget) +
         inner(grad, f_matrix - at.f_matrix);
}

double spectral_norm(const CMatrix& f_matrix) {
  return principal_eigenpair(f_matrix).value;
}

double rank_one_gap(const CMatrix& f_matrix) {
  return f_matrix.trace().real() - spectral_norm(f_matrix);
}

double spectral_norm_lower_bound(const CMatrix& f_matrix,
                                 const ScaExpansionPoint& at) {
  const PrincipalEigenpair top = principal_eigenpair(at.f_matrix);
  const CVector& u = top.vector;
  // tr(u u^H X) = u^H X u
  return top.value + u.dot((f_matrix - at.f_matrix) * u).real();
}

double h1(const RVector& powers, int k, const CMatrix& f_matrix,
          std::span<const UserChannel> channels, const LinkBudget& budget) {
  return g1(f_matrix, k, powers, channels, budget);
}

double h2(const RVector& powers, int k, const CMatrix& f_matrix,
          std::span<const UserChannel> channels, const LinkBudget& budget) {
  return g2(f_matrix, k, powers, channels, budget);
}

RVector h2_gradient(const ScaExpansionPoint& at, int k, const CMatrix& f_matrix,
                    std::span<const UserChannel> channels,
                    const LinkBudget& budget) {
  check_user(k, at.powers, channels);
  const double t = lifted_gain(channels[k].coefficients, f_matrix);
  const double denom =
      (interference_weight(k, at.powers) * t + budget.noise_power) * std::numbers::ln2;
  RVector grad = RVector::Constant(at.powers.size(), t / denom);
  grad[k] = 0.0;
  return grad;
}

double h2_upper_bound(const RVector& powers, const ScaExpansionPoint& at, int k,
                      const CMatrix& f_matrix,
                      std::span<const UserChannel> channels,
                      const LinkBudget& budget) {
  const RVector grad = h2_gradient(at, k, f_matrix, channels, budget);
  return h2(at.powers, k, f_matrix, channels, budget) +
         grad.dot(powers - at.powers);
}

}  // namespace rmstx
