#include "rmstx/baselines.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rmstx {

BaselineResult equal_allocation(std::span<const UserChannel> channels,
                                const LinkBudget& budget, const AoConfig& config) {
  if (channels.empty()) throw std::invalid_argument("equal_allocation: no users");
  LinkBudget relaxed = budget;
  relaxed.sinr_threshold = 0.0;
  AoConfig frozen = config;
  frozen.optimize_power = false;

  const AoStart start = initialize(channels, relaxed);
  const PowerAllocation p = PowerAllocation::equal_split(static_cast<int>(channels.size()),
                                                         budget.total_power);
  const AoResult run = optimize_from(channels, relaxed, frozen, start.f, p);
  return {run.f, p, run.status, run.f_matrix, run.trace};
}

BaselineResult zf_beamforming(std::span<const UserChannel> channels,
                              const LinkBudget& budget) {
  if (channels.empty()) throw std::invalid_argument("zf_beamforming: no users");
  const auto k = static_cast<Eigen::Index>(channels.size());
  const Eigen::Index m = channels.front().coefficients.size();
  if (k > m) throw std::invalid_argument("zf_beamforming: more users than elements");

  CMatrix h(m, k);
  for (Eigen::Index i = 0; i < k; ++i)
    h.col(i) = channels[static_cast<std::size_t>(i)].coefficients;
  CMatrix gram = h.adjoint() * h;
  gram.diagonal().array() += 1e-9 * gram.trace().real();
  CVector f = h * gram.ldlt().solve(CVector::Ones(k));
  const double peak = f.cwiseAbs().maxCoeff();
  if (peak > 0.0) f /= peak;
  BaselineResult out;
  out.f = {f};
  out.p = PowerAllocation::equal_split(static_cast<int>(k), budget.total_power);
  return out;
}

BaselineResult random_allocation(std::span<const UserChannel> channels,
                                 const LinkBudget& budget, Rng& rng) {
  if (channels.empty()) throw std::invalid_argument("random_allocation: no users");
  const Eigen::Index m = channels.front().coefficients.size();
  const auto k = static_cast<Eigen::Index>(channels.size());

  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  CVector f(m);
  for (Eigen::Index i = 0; i < m; ++i) f[i] = std::polar(1.0, phase(rng));

  // Normalised i.i.d. exponentials are Dirichlet(1, ..., 1).
  std::exponential_distribution<double> exponential(1.0);
  RVector draws(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    do {
      draws[i] = exponential(rng);
    } while (draws[i] == 0.0);
  }
  BaselineResult out;
  out.f = {f};
  out.p = {RVector(budget.total_power * draws / draws.sum())};
  return out;
}

}  // namespace rmstx
