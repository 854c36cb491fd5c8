#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "rmstx/channel.hpp"

namespace rmstx {

// Two source bits; b0 is the first bit of the pair in stream order.
struct BitPair {
  bool b0 = false;
  bool b1 = false;
  friend bool operator==(const BitPair&, const BitPair&) = default;
};

struct QpskSymbol {
  double phase = 0.0;  // one of pi/4, 3pi/4, 5pi/4, 7pi/4
  BitPair bits;

  Complex value() const { return std::polar(1.0, phase); }
};

// Gray mapping: 00 -> pi/4, 01 -> 3pi/4, 11 -> 5pi/4, 10 -> 7pi/4.
QpskSymbol map_bits(BitPair bits);
// Nearest constellation point.
BitPair demap(Complex sample);
// Bit stream (even length) to symbols.
std::vector<QpskSymbol> map_stream(std::span<const std::uint8_t> bits);

// Element coefficient f_m rotated by the symbol phase; |value| = |f_m|.
struct UltimateCoefficient {
  Complex value;
};

UltimateCoefficient compose(Complex f_m, const QpskSymbol& symbol);
// Whole-surface configuration for one symbol period.
CVector compose(const TransmissionCoefficients& f, const QpskSymbol& symbol);

struct ReceivedSample {
  Complex value;
  double noise_power = 0.0;
};

// One realisation of y_k = h^H f sqrt(p_k) s_k + h^H f sum_{i!=k} sqrt(p_i) s_i + n_k
// per user; `symbols[k]` is user k's symbol and n_k ~ CN(0, s2).
std::vector<ReceivedSample> simulate_received(std::span<const UserChannel> channels,
                                              const TransmissionCoefficients& f,
                                              const PowerAllocation& p,
                                              std::span<const QpskSymbol> symbols,
                                              const LinkBudget& budget, Rng& rng);

// Monte-Carlo SINR per user over `n_symbols` independent QPSK draws: desired
// power sum over the signal-free remainder y_k - h^H f sqrt(p_k) s_k.
RVector empirical_sinr(std::span<const UserChannel> channels,
                       const TransmissionCoefficients& f, const PowerAllocation& p,
                       const LinkBudget& budget, int n_symbols, Rng& rng);

}  // namespace rmstx
