#include <cmath>
#include <numbers>

#include "doctest.h"
#include "rmstx/ao.hpp"
#include "rmstx/solver.hpp"
#include "support.hpp"

using namespace rmstx;
using namespace rmstx::testing;

namespace {

PsdSubproblem single_user_problem(const CVector& h, double p, double noise) {
  PsdSubproblem prob;
  prob.log_terms.push_back({h, p, noise});
  prob.linear = CMatrix::Zero(h.size(), h.size());
  return prob;
}

double min_eigenvalue(const CMatrix& f) {
  return Eigen::SelfAdjointEigenSolver<CMatrix>(f).eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("psd: scalar problem hits the diagonal cap") {
  const auto prob = single_user_problem(CVector::Constant(1, 2.0), 1.0, 1.0);
  const auto r = solve_psd_subproblem(prob, CMatrix::Constant(1, 1, 0.3));
  CHECK(r.status == SolverStatus::optimal);
  CHECK(r.solution(0, 0).real() == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("psd: two elements, one user, against a grid over rank-one beams") {
  Rng rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    const CVector h = random_cvector(2, rng);
    const double p = 1.5;
    const double noise = 0.1;
    const auto prob = single_user_problem(h, p, noise);
    const auto r = solve_psd_subproblem(prob, 0.5 * CMatrix::Identity(2, 2));
    REQUIRE(r.status != SolverStatus::infeasible);

    double best = -std::numeric_limits<double>::infinity();
    const int n = 100;
    for (int ia = 0; ia < n; ++ia) {
      const double alpha = 2.0 * std::numbers::pi * ia / n;
      for (int ib = 0; ib < n; ++ib) {
        const double beta = static_cast<double>(ib) / (n - 1);
        for (int ig = 0; ig < n; ++ig) {
          const double gamma = 2.0 * std::numbers::pi * ig / n;
          CVector f(2);
          f << std::polar(1.0, alpha), std::polar(beta, gamma);
          best = std::max(best, std::log2(p * std::norm(h.dot(f)) + noise));
        }
      }
    }
    CHECK(r.objective >= best - 0.01 * std::abs(best));
    // Grid resolution bounds how far the optimum can sit above it.
    CHECK(r.objective <= best + 0.01 * std::abs(best));
  }
}

TEST_CASE("psd: constraints hold and the ascent contract is kept") {
  Rng rng(37);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index m = 2 + static_cast<Eigen::Index>(u(rng) * 5);
    const int k = 1 + static_cast<int>(u(rng) * 3);
    const auto ch = random_channels(k, m, rng);
    const ScaExpansionPoint at{random_psd(m, rng), random_simplex(k, 2.0, rng)};
    LinkBudget b = unit_budget(2.0, 0.2, 0.0);
    const auto prob = build_beam_subproblem(at, ch, b, 0.5);

    SolverOptions opts;
    opts.tolerance = 1e-8;
    const auto r = solve_psd_subproblem(prob, at.f_matrix, opts);
    REQUIRE(r.status != SolverStatus::infeasible);
    CHECK(r.objective >= prob.objective(at.f_matrix) - 1e-9);
    CHECK(prob.feasible(r.solution, 1e-7));
    CHECK(r.solution.diagonal().real().maxCoeff() <= 1.0 + 1e-7);
    CHECK(min_eigenvalue(r.solution) >= -1e-7 * r.solution.trace().real());
    if (r.status == SolverStatus::optimal) CHECK(r.residual <= opts.tolerance);
  }
}

TEST_CASE("psd: QoS rows are respected") {
  Rng rng(41);
  const auto ch = random_channels(2, 4, rng);
  const RVector p = RVector::Constant(2, 1.0);
  const LinkBudget b = unit_budget(2.0, 0.1, 0.2);
  const auto start = find_feasible_point(ch, b);
  REQUIRE(start.feasible);
  const ScaExpansionPoint at{LiftedBeamMatrix::from_vector(start.f).matrix, start.p.powers};
  const auto prob = build_beam_subproblem(at, ch, b, 0.1);
  REQUIRE(prob.qos_rows.size() == 2);
  const auto r = solve_psd_subproblem(prob, at.f_matrix);
  REQUIRE(r.status != SolverStatus::infeasible);
  for (const auto& row : prob.qos_rows)
    CHECK(row.coeff * row.channel.dot(r.solution * row.channel).real() >= row.rhs - 1e-7);
}

TEST_CASE("psd: impossible QoS row is reported infeasible") {
  auto prob = single_user_problem(CVector::Ones(2), 1.0, 1.0);
  prob.qos_rows.push_back({CVector::Ones(2), -1.0, 0.5});
  CHECK(solve_psd_subproblem(prob, 0.5 * CMatrix::Identity(2, 2)).status ==
        SolverStatus::infeasible);
  auto too_high = single_user_problem(CVector::Ones(2), 1.0, 1.0);
  // h^H F h <= 4 under diag <= 1, so asking for 10 cannot be met.
  too_high.qos_rows.push_back({CVector::Ones(2), 1.0, 10.0});
  CHECK(solve_psd_subproblem(too_high, 0.5 * CMatrix::Identity(2, 2)).status ==
        SolverStatus::infeasible);
}

TEST_CASE("simplex: single user takes the whole budget") {
  SimplexSubproblem prob;
  prob.log_terms.push_back({RVector::Constant(1, 3.0), 1.0});
  prob.linear = RVector::Zero(1);
  prob.budget = 2.0;
  prob.floor = 2e-9;
  const auto r = solve_simplex_subproblem(prob, RVector::Constant(1, 1.0));
  CHECK(r.solution[0] == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("simplex: two users against a fine line search of the surrogate") {
  Rng rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    const auto ch = random_channels(2, 4, rng);
    const LinkBudget b = unit_budget(3.0, 0.2);
    const auto f = random_beam(4, rng);
    const ScaExpansionPoint at{LiftedBeamMatrix::from_vector(f).matrix,
                               random_simplex(2, 3.0, rng)};
    const auto prob = build_power_subproblem(at, ch, b);
    SolverOptions opts;
    opts.tolerance = 1e-9;
    const auto r = solve_simplex_subproblem(prob, at.powers, opts);
    REQUIRE(r.status != SolverStatus::infeasible);

    double best = -std::numeric_limits<double>::infinity();
    const int n = 100000;
    for (int i = 0; i <= n; ++i) {
      RVector p(2);
      p[0] = prob.floor + (b.total_power - 2.0 * prob.floor) * i / n;
      p[1] = b.total_power - p[0];
      best = std::max(best, prob.objective(p));
    }
    CHECK(r.objective >= best - 0.005 * std::abs(best));
    CHECK(prob.feasible(r.solution, 1e-7));
  }
}

TEST_CASE("simplex: exact two-user rate peaks at a vertex of the budget line") {
  Rng rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    RVector g(2);
    g << 0.5 + std::abs(random_cvector(1, rng)[0]), 0.5 + std::abs(random_cvector(1, rng)[0]);
    const LinkBudget b = unit_budget(2.0, 0.1);
    const double eps = 1e-9 * b.total_power;
    const int n = 2000;
    int best_i = 0;
    double best = -1.0;
    for (int i = 0; i <= n; ++i) {
      RVector p(2);
      p[0] = eps + (b.total_power - 2.0 * eps) * i / n;
      p[1] = b.total_power - p[0];
      const double rate = sum_rate_from_gains(g, {p}, b);
      if (rate > best) {
        best = rate;
        best_i = i;
      }
    }
    CHECK((best_i == 0 || best_i == n));
  }
}

TEST_CASE("simplex: QoS conflicting with the budget is infeasible") {
  SimplexSubproblem prob;
  prob.log_terms.push_back({RVector::Ones(2), 1.0});
  prob.linear = RVector::Zero(2);
  prob.budget = 1.0;
  prob.floor = 1e-9;
  prob.qos_rows.push_back({RVector::Ones(2), 5.0});
  CHECK(solve_simplex_subproblem(prob, RVector::Constant(2, 0.4)).status ==
        SolverStatus::infeasible);
}

TEST_CASE("co-phasing maximises a single user's gain") {
  Rng rng(53);
  const CVector h = random_cvector(8, rng);
  const auto f = co_phase(h);
  CHECK(effective_gain(h, f) == doctest::Approx(std::pow(h.cwiseAbs().sum(), 2)));
  for (Eigen::Index m = 0; m < 8; ++m) CHECK(std::abs(f.values[m]) == doctest::Approx(1.0));
}

TEST_CASE("feasible point") {
  Rng rng(59);
  SUBCASE("no threshold returns the default start") {
    const auto ch = random_channels(3, 4, rng);
    const auto fp = find_feasible_point(ch, unit_budget(3.0, 0.1, 0.0));
    CHECK(fp.feasible);
    CHECK(fp.p.powers.isApprox(RVector::Constant(3, 1.0)));
  }
  SUBCASE("single user beyond the co-phased SINR is infeasible") {
    const auto ch = random_channels(1, 4, rng);
    const double best = 2.0 * std::pow(ch[0].coefficients.cwiseAbs().sum(), 2) / 0.1;
    const auto fp = find_feasible_point(ch, unit_budget(2.0, 0.1, 1.01 * best));
    CHECK_FALSE(fp.feasible);
    CHECK(fp.max_min_sinr == doctest::Approx(best));
  }
  SUBCASE("feasible threshold gives strictly positive slack") {
    const auto ch = random_channels(3, 6, rng);
    const LinkBudget b = unit_budget(3.0, 0.1, 0.2);
    const auto fp = find_feasible_point(ch, b);
    REQUIRE(fp.feasible);
    for (double s : fp.slack) CHECK(s > 0.0);
    CHECK(fp.f.is_valid());
    CHECK(fp.p.is_valid(b.total_power));
  }
  SUBCASE("threshold above 1/(K-1) can never be met") {
    const auto ch = random_channels(3, 6, rng);
    const auto fp = find_feasible_point(ch, unit_budget(3.0, 0.1, 0.6));
    CHECK_FALSE(fp.feasible);
    CHECK(fp.max_min_sinr < 0.5);
  }
}

TEST_CASE("rank-one extraction") {
  Rng rng(61);
  SUBCASE("exact rank one recovers the vector up to a phase") {
    const auto v = random_beam(5, rng);
    const auto out = extract_rank_one(LiftedBeamMatrix::from_vector(v).matrix);
    const Complex phase = out.f.values.dot(v.values);
    CHECK(std::abs(phase) == doctest::Approx(v.values.squaredNorm()));
    CHECK((out.f.values * (phase / std::abs(phase)) - v.values).norm() < 1e-9);
    CHECK_FALSE(out.high_residual);
  }
  SUBCASE("isotropic matrix is flagged") {
    CMatrix f = 0.5 * CMatrix::Identity(2, 2);
    const auto out = extract_rank_one(f);
    CHECK(out.gap == doctest::Approx(0.5));
    CHECK(out.high_residual);
    CHECK(out.f.values.norm() == doctest::Approx(std::sqrt(0.5)));
    CHECK(std::min(std::abs(out.f.values[0]), std::abs(out.f.values[1])) < 1e-12);
  }
  SUBCASE("zero matrix") {
    const auto out = extract_rank_one(CMatrix::Zero(3, 3));
    CHECK(out.zero_matrix);
    CHECK(out.f.values.norm() == 0.0);
  }
  SUBCASE("entries are clipped to unit magnitude") {
    for (int n = 0; n < 200; ++n) {
      const auto out = extract_rank_one(random_psd(4, rng));
      CHECK(out.f.is_valid());
    }
  }
}
