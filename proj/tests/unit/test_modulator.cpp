#include <cmath>
#include <numbers>
#include <set>

#include "doctest.h"
#include "rmstx/modulator.hpp"
#include "support.hpp"

using namespace rmstx;
using namespace rmstx::testing;

TEST_CASE("Gray mapping table") {
  constexpr double q = std::numbers::pi / 4.0;
  CHECK(map_bits({false, false}).phase == doctest::Approx(q));
  CHECK(map_bits({false, true}).phase == doctest::Approx(3 * q));
  CHECK(map_bits({true, true}).phase == doctest::Approx(5 * q));
  CHECK(map_bits({true, false}).phase == doctest::Approx(7 * q));
}

TEST_CASE("map and demap round trip") {
  std::set<long> phases;
  for (bool b0 : {false, true}) {
    for (bool b1 : {false, true}) {
      const QpskSymbol s = map_bits({b0, b1});
      phases.insert(std::lround(s.phase * 1e6));
      CHECK(demap(s.value()) == BitPair{b0, b1});
      CHECK(std::abs(s.value()) == doctest::Approx(1.0));
    }
  }
  CHECK(phases.size() == 4);
}

TEST_CASE("bit streams") {
  const std::vector<std::uint8_t> bits{0, 0, 1, 1, 1, 0};
  const auto symbols = map_stream(bits);
  REQUIRE(symbols.size() == 3);
  CHECK(symbols[1].bits == BitPair{true, true});
  const std::vector<std::uint8_t> odd{1, 0, 1};
  CHECK_THROWS(map_stream(odd));
}

TEST_CASE("composition") {
  const QpskSymbol s = map_bits({false, false});
  const auto c = compose(Complex(1.0, 0.0), s);
  CHECK(std::abs(c.value - std::polar(1.0, std::numbers::pi / 4.0)) < 1e-15);

  Rng rng(101);
  const auto f = random_beam(6, rng);
  std::vector<CVector> composed;
  for (bool b0 : {false, true})
    for (bool b1 : {false, true}) composed.push_back(compose(f, map_bits({b0, b1})));
  for (const auto& v : composed) {
    for (Eigen::Index m = 0; m < 6; ++m)
      CHECK(std::abs(v[m]) == doctest::Approx(std::abs(f.values[m])));
  }
  // Each configuration is the first rotated by a multiple of pi/2.
  for (const auto& v : composed) {
    bool matched = false;
    for (int r = 0; r < 4; ++r)
      matched |= (v - composed[0] * std::polar(1.0, r * std::numbers::pi / 2.0)).norm() < 1e-12;
    CHECK(matched);
  }
}

TEST_CASE("received samples") {
  Rng rng(103);
  SUBCASE("noise-free single user") {
    const auto ch = random_channels(1, 4, rng);
    const auto f = random_beam(4, rng);
    const PowerAllocation p{RVector::Constant(1, 2.0)};
    const std::vector<QpskSymbol> sym{map_bits({true, false})};
    const auto y = simulate_received(ch, f, p, sym, unit_budget(2.0, 1e-300), rng);
    const Complex expected = ch[0].coefficients.dot(f.values) * std::sqrt(2.0) * sym[0].value();
    CHECK(std::abs(y[0].value - expected) < 1e-12);
  }
  SUBCASE("zero power leaves only noise") {
    const auto ch = random_channels(2, 4, rng);
    const auto f = random_beam(4, rng);
    const PowerAllocation p{RVector::Zero(2)};
    const std::vector<QpskSymbol> sym(2, map_bits({false, false}));
    double power = 0.0;
    const int n = 50000;
    for (int i = 0; i < n; ++i) power += std::norm(simulate_received(ch, f, p, sym, unit_budget(1.0, 0.3), rng)[1].value);
    CHECK(power / n == doctest::Approx(0.3).epsilon(0.03));
  }
}

TEST_CASE("Monte-Carlo SINR matches the analytic value") {
  Rng rng(107);
  const auto ch = random_channels(3, 5, rng);
  const auto f = random_beam(5, rng);
  const PowerAllocation p{random_simplex(3, 3.0, rng)};
  const LinkBudget b = unit_budget(3.0, 0.5);
  const RVector measured = empirical_sinr(ch, f, p, b, 100000, rng);
  const RVector g = effective_gains(ch, f);
  for (int k = 0; k < 3; ++k) CHECK(measured[k] == doctest::Approx(sinr(k, g, p, b)).epsilon(0.03));
}
