#include <cmath>

#include "doctest.h"
#include "rmstx/baselines.hpp"
#include "rmstx/experiments.hpp"
#include "support.hpp"

using namespace rmstx;
using namespace rmstx::testing;

TEST_CASE("equal allocation") {
  SUBCASE("single user matches the full algorithm") {
    Rng rng(81);
    const auto ch = random_channels(1, 4, rng);
    const LinkBudget b = unit_budget(2.0, 0.1);
    const auto ea = equal_allocation(ch, b);
    const auto full = optimize(ch, b);
    CHECK(sum_rate(ch, ea.f, ea.p, b) == doctest::Approx(sum_rate(ch, full.f, full.p, b)).epsilon(1e-3));
  }
  SUBCASE("powers are an exact equal split") {
    ScenarioConfig config;
    const Scenario s = build_scenario(config, 1);
    const auto ea = equal_allocation(s.channels, s.budget, config.ao);
    CHECK(ea.p.total() == doctest::Approx(s.budget.total_power).epsilon(1e-15));
    for (Eigen::Index k = 0; k < ea.p.size(); ++k)
      CHECK(ea.p.powers[k] == doctest::Approx(s.budget.total_power / 4.0));
    CHECK(ea.f.is_valid());
  }
}

TEST_CASE("zero-forcing beam") {
  Rng rng(83);
  SUBCASE("single user is the matched direction") {
    const auto ch = random_channels(1, 5, rng);
    const auto zf = zf_beamforming(ch, unit_budget());
    const CVector h = ch[0].coefficients;
    // f proportional to h, so |h^H f| = ||h|| ||f||.
    CHECK(std::abs(h.dot(zf.f.values)) == doctest::Approx(h.norm() * zf.f.values.norm()));
    CHECK(zf.f.max_magnitude() == doctest::Approx(1.0));
  }
  SUBCASE("equal effective amplitude toward every user") {
    const auto ch = random_channels(3, 8, rng);
    const auto zf = zf_beamforming(ch, unit_budget(3.0));
    const RVector g = effective_gains(ch, zf.f);
    CHECK(g.maxCoeff() == doctest::Approx(g.minCoeff()).epsilon(1e-6));
    CHECK(zf.f.is_valid());
    CHECK(zf.p.total() == doctest::Approx(3.0));
  }
  SUBCASE("more users than elements is rejected") {
    const auto ch = random_channels(4, 2, rng);
    CHECK_THROWS_AS(zf_beamforming(ch, unit_budget()), std::invalid_argument);
  }
}

TEST_CASE("random allocation") {
  Rng rng(89);
  const auto ch = random_channels(4, 9, rng);
  for (int n = 0; n < 1000; ++n) {
    const auto ra = random_allocation(ch, unit_budget(5.0), rng);
    for (Eigen::Index m = 0; m < 9; ++m) CHECK(std::abs(ra.f.values[m]) == doctest::Approx(1.0));
    CHECK(std::abs(ra.p.total() - 5.0) <= 1e-12);
    CHECK(ra.p.powers.minCoeff() > 0.0);
  }
}

TEST_CASE("random simplex draws have Dirichlet(1) marginals") {
  // Each coordinate of a flat Dirichlet in K dimensions has mean 1/K and
  // variance (K-1)/(K^2 (K+1)).
  Rng rng(97);
  Rng channel_rng(1);
  const auto ch = random_channels(4, 4, channel_rng);
  const int n = 20000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = random_allocation(ch, unit_budget(1.0), rng).p.powers[0];
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n;
  CHECK(mean == doctest::Approx(0.25).epsilon(0.02));
  CHECK(sum_sq / n - mean * mean == doctest::Approx(3.0 / 80.0).epsilon(0.05));
}
