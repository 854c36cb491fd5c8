#include "rmstx/modulator.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace rmstx {
namespace {

constexpr double kQuarter = std::numbers::pi / 4.0;

}  // namespace

QpskSymbol map_bits(BitPair bits) {
  // Gray order around the circle: 00, 01, 11, 10.
  int index = 0;
  if (!bits.b0 && bits.b1) index = 1;
  if (bits.b0 && bits.b1) index = 2;
  if (bits.b0 && !bits.b1) index = 3;
  return {kQuarter * (2 * index + 1), bits};
}

BitPair demap(Complex sample) {
  // Quadrant decides the symbol.
  const bool upper = sample.imag() >= 0.0;
  const bool right = sample.real() >= 0.0;
  if (upper && right) return {false, false};
  if (upper && !right) return {false, true};
  if (!upper && !right) return {true, true};
  return {true, false};
}

std::vector<QpskSymbol> map_stream(std::span<const std::uint8_t> bits) {
  if (bits.size() % 2 != 0) throw std::invalid_argument("map_stream: odd bit count");
  std::vector<QpskSymbol> out;
  out.reserve(bits.size() / 2);
  for (std::size_t i = 0; i < bits.size(); i += 2)
    out.push_back(map_bits({bits[i] != 0, bits[i + 1] != 0}));
  return out;
}

UltimateCoefficient compose(Complex f_m, const QpskSymbol& symbol) {
  return {f_m * symbol.value()};
}

CVector compose(const TransmissionCoefficients& f, const QpskSymbol& symbol) {
  return f.values * symbol.value();
}

std::vector<ReceivedSample> simulate_received(std::span<const UserChannel> channels,
                                              const TransmissionCoefficients& f,
                                              const PowerAllocation& p,
                                              std::span<const QpskSymbol> symbols,
                                              const LinkBudget& budget, Rng& rng) {
  const std::size_t k_users = channels.size();
  if (symbols.size() != k_users || p.size() != static_cast<Eigen::Index>(k_users))
    throw std::invalid_argument("simulate_received: size mismatch");

  // Superposition sum_i sqrt(p_i) s_i rides on every user's effective channel.
  Complex superposed(0.0, 0.0);
  for (std::size_t i = 0; i < k_users; ++i)
    superposed += std::sqrt(p.powers[static_cast<Eigen::Index>(i)]) * symbols[i].value();

  std::normal_distribution<double> normal(0.0, std::sqrt(budget.noise_power / 2.0));
  std::vector<ReceivedSample> out;
  out.reserve(k_users);
  for (std::size_t k = 0; k < k_users; ++k) {
    const Complex gain = channels[k].coefficients.dot(f.values);  // h^H f
    const Complex noise(normal(rng), normal(rng));
    out.push_back({gain * superposed + noise, budget.noise_power});
  }
  return out;
}

RVector empirical_sinr(std::span<const UserChannel> channels,
                       const TransmissionCoefficients& f, const PowerAllocation& p,
                       const LinkBudget& budget, int n_symbols, Rng& rng) {
  if (n_symbols < 1) throw std::invalid_argument("empirical_sinr: n_symbols < 1");
  const std::size_t k_users = channels.size();
  std::uniform_int_distribution<int> bit(0, 1);

  RVector desired = RVector::Zero(static_cast<Eigen::Index>(k_users));
  RVector remainder = RVector::Zero(static_cast<Eigen::Index>(k_users));
  std::vector<QpskSymbol> symbols(k_users);
  for (int n = 0; n < n_symbols; ++n) {
    for (auto& s : symbols) s = map_bits({bit(rng) == 1, bit(rng) == 1});
    const auto received = simulate_received(channels, f, p, symbols, budget, rng);
    for (std::size_t k = 0; k < k_users; ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      const Complex gain = channels[k].coefficients.dot(f.values);
      const Complex wanted = gain * std::sqrt(p.powers[kk]) * symbols[k].value();
      desired[kk] += std::norm(wanted);
      remainder[kk] += std::norm(received[k].value - wanted);
    }
  }
  RVector out(static_cast<Eigen::Index>(k_users));
  for (Eigen::Index k = 0; k < out.size(); ++k)
    out[k] = remainder[k] > 0.0 ? desired[k] / remainder[k]
                                : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace rmstx
