#pragma once

#include <random>
#include <vector>

#include "rmstx/channel.hpp"
#include "rmstx/linkmath.hpp"

namespace rmstx::testing {

inline CVector random_cvector(Eigen::Index n, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale * std::sqrt(0.5));
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = {normal(rng), normal(rng)};
  return v;
}

inline std::vector<UserChannel> random_channels(int k_users, Eigen::Index m, Rng& rng,
                                                double scale = 1.0) {
  std::vector<UserChannel> out(static_cast<std::size_t>(k_users));
  for (auto& c : out) c.coefficients = random_cvector(m, rng, scale);
  return out;
}

// Unit-modulus-capped random beam.
inline TransmissionCoefficients random_beam(Eigen::Index m, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CVector f(m);
  for (Eigen::Index i = 0; i < m; ++i) f[i] = std::polar(u(rng), 2.0 * 3.141592653589793 * u(rng));
  return {f};
}

// Random PSD matrix with unit-capped diagonal and random rank.
inline CMatrix random_psd(Eigen::Index m, Rng& rng) {
  std::uniform_int_distribution<int> rank_draw(1, static_cast<int>(m));
  const int rank = rank_draw(rng);
  CMatrix a(m, rank);
  for (int r = 0; r < rank; ++r) a.col(r) = random_cvector(m, rng);
  CMatrix f = a * a.adjoint();
  const double peak = f.diagonal().real().maxCoeff();
  return f / std::max(peak, 1e-12);
}

inline RVector random_simplex(int k, double total, Rng& rng) {
  std::exponential_distribution<double> e(1.0);
  RVector p(k);
  for (int i = 0; i < k; ++i) p[i] = e(rng) + 1e-6;
  return total * p / p.sum();
}

inline CMatrix random_hermitian(Eigen::Index m, Rng& rng) {
  const CMatrix a = [&] {
    CMatrix x(m, m);
    for (Eigen::Index j = 0; j < m; ++j) x.col(j) = random_cvector(m, rng);
    return x;
  }();
  return 0.5 * (a + a.adjoint());
}

inline LinkBudget unit_budget(double total = 1.0, double noise = 1.0, double gamma = 0.0) {
  LinkBudget b;
  b.noise_power = noise;
  b.total_power = total;
  b.sinr_threshold = gamma;
  return b;
}

}  // namespace rmstx::testing
