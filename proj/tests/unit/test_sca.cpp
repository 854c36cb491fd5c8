#include <cmath>

#include "doctest.h"
#include "rmstx/sca.hpp"
#include "sca_suite.hpp"
#include "support.hpp"

using namespace rmstx;
using namespace rmstx::testing;

TEST_CASE("g1 at the zero beam is log2 of the noise") {
  Rng rng(2);
  const auto ch = random_channels(3, 4, rng);
  const auto b = unit_budget(3.0, 0.25);
  CHECK(g1(CMatrix::Zero(4, 4), 1, RVector::Ones(3), ch, b) == doctest::Approx(-2.0));
}

TEST_CASE("g1 on a lifted vector matches the vector form") {
  Rng rng(9);
  const auto ch = random_channels(3, 6, rng);
  const auto f = random_beam(6, rng);
  const RVector p = random_simplex(3, 2.0, rng);
  const auto b = unit_budget(2.0, 0.5);
  const double expected = std::log2(p.sum() * effective_gain(ch[2].coefficients, f) + 0.5);
  CHECK(g1(LiftedBeamMatrix::from_vector(f).matrix, 2, p, ch, b) == doctest::Approx(expected));
}

TEST_CASE("g1 is concave along random chords") {
  Rng rng(10);
  for (int n = 0; n < 1000; ++n) {
    const auto ch = random_channels(2, 5, rng);
    const RVector p = random_simplex(2, 1.0, rng);
    const auto b = unit_budget(1.0, 0.1);
    const CMatrix a = random_psd(5, rng);
    const CMatrix c = random_psd(5, rng);
    CHECK(g1(0.5 * (a + c), 0, p, ch, b) >=
          0.5 * (g1(a, 0, p, ch, b) + g1(c, 0, p, ch, b)) - 1e-12);
  }
}

TEST_CASE("single user surrogates are constant") {
  Rng rng(12);
  const auto ch = random_channels(1, 4, rng);
  const auto b = unit_budget(1.0, 0.3);
  const ScaExpansionPoint at{random_psd(4, rng), RVector::Ones(1)};
  CHECK(g2_gradient(at, 0, at.powers, ch, b).norm() == 0.0);
  CHECK(g2_upper_bound(random_psd(4, rng), at, 0, at.powers, ch, b) ==
        doctest::Approx(std::log2(0.3)));
  CHECK(h2_upper_bound(RVector::Constant(1, 0.2), at, 0, at.f_matrix, ch, b) ==
        doctest::Approx(std::log2(0.3)));
}

TEST_CASE("rank-one gap") {
  Rng rng(13);
  const CVector u = random_cvector(5, rng).normalized();
  CHECK(std::abs(rank_one_gap(u * u.adjoint())) < 1e-12);
  CHECK(rank_one_gap(CMatrix::Identity(2, 2)) == doctest::Approx(1.0));
  for (int n = 0; n < 1000; ++n) {
    const CMatrix f = random_psd(4, rng);
    const double gap = rank_one_gap(f);
    CHECK(gap >= -1e-9);
    const Eigen::SelfAdjointEigenSolver<CMatrix> eig(f);
    const double second = eig.eigenvalues()[eig.eigenvalues().size() - 2];
    const bool rank_one = second <= 1e-9 * f.trace().real();
    CHECK(rank_one == (gap <= 1e-9 * f.trace().real()));
  }
}

TEST_CASE("spectral-norm bound is exact along the principal ray") {
  Rng rng(14);
  const CVector u = random_cvector(4, rng).normalized();
  const ScaExpansionPoint at{u * u.adjoint(), RVector::Ones(1)};
  for (double c : {0.1, 1.0, 2.5}) {
    const CMatrix f = c * (u * u.adjoint());
    CHECK(spectral_norm_lower_bound(f, at) == doctest::Approx(c));
    CHECK(spectral_norm(f) == doctest::Approx(c));
  }
}

TEST_CASE("principal eigenpair on a tie is deterministic") {
  const CMatrix f = CMatrix::Identity(3, 3);
  const auto a = principal_eigenpair(f);
  const auto b = principal_eigenpair(f);
  CHECK(a.value == doctest::Approx(1.0));
  CHECK(a.vector == b.vector);
  CHECK(a.vector.norm() == doctest::Approx(1.0));
}

TEST_CASE("inner product is the real part of tr(A^H B)") {
  Rng rng(15);
  const CMatrix a = random_hermitian(4, rng);
  const CMatrix b = random_psd(4, rng);
  CHECK(inner(a, b) == doctest::Approx((a.adjoint() * b).trace().real()));
}

TEST_CASE("tangency, bound direction and gradients on random samples") {
  const ScaSuiteResult r = run_sca_suite(2024, 1000);
  CHECK(r.max_tangency_error <= 1e-9);
  CHECK(r.g2_bound_violations == 0);
  CHECK(r.spectral_bound_violations == 0);
  CHECK(r.h2_bound_violations == 0);
  CHECK(r.max_g2_gradient_error <= 1e-5);
  CHECK(r.max_h2_gradient_error <= 1e-5);
}
