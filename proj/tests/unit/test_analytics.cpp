#include "cvm/analytics.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <cmath>
#include <numbers>

using namespace cvm;

namespace {

Rational q(long p, long d) {
  Rational r(p, d);
  r.canonicalize();
  return r;
}

std::vector<Rational> symmetric_vector(int F, const Rational& rho1, const Rational& rho2) {
  std::vector<Rational> v(static_cast<std::size_t>(F), rho2);
  v.front() = rho1;
  v.back() = rho1;
  return v;
}

} // namespace

TEST_CASE("power sums") {
  CHECK(sums(1) == PowerSums{1, 1, 1});
  CHECK(sums(3) == PowerSums{6, 14, 36});
  CHECK(sums(0) == PowerSums{0, 0, 0});
  CHECK_THROWS_AS(sums(-1), std::invalid_argument);
  for (int t = 0; t <= 30; ++t) {
    const auto s = sums(t);
    CHECK(s.s1 == oracle::power_sum(t, 1));
    CHECK(s.s2 == oracle::power_sum(t, 2));
    CHECK(s.s3 == oracle::power_sum(t, 3));
  }
  CHECK(triangular(-3) == 3);
  CHECK(triangular(4) == 10);
}

TEST_CASE("weight function") {
  const WeightFunction w(2);
  CHECK(w(0) == 0);
  CHECK(w(1) == -1);
  CHECK(w(2) == -2);
  CHECK(w(3) == -1);
  CHECK(w(5) == 1);
  for (int t = 1; t < 6; ++t)
    for (int j = 0; j < 12; ++j) CHECK(WeightFunction(t)(j) == oracle::weight(j, t));
}

TEST_CASE("edge type probabilities") {
  const Params p(4, 1);
  const auto u = DensityVector::uniform(4);
  CHECK(edge_type_prob(p, u, 3) == q(1, 8));
  CHECK(edge_type_prob(p, u, 1) == q(3, 8));
  CHECK(edge_type_prob(p, u, 0) == q(1, 4));
  CHECK_THROWS_AS(edge_type_prob(p, u, 4), std::out_of_range);
  for (int F = 3; F <= 9; ++F) {
    const auto s = SymmetricDensity::from_rho2(F, q(1, 2 * F));
    Rational total = edge_type_prob(Params(F, 1), s.to_density(), 0);
    for (int j = 1; j < F; ++j) {
      CHECK(edge_type_prob(Params(F, 1), s, j) == edge_type_prob(Params(F, 1), s.to_density(), j));
      total += edge_type_prob(Params(F, 1), s, j);
    }
    CHECK(total == 1);
  }
}

TEST_CASE("symmetric density") {
  const auto s = SymmetricDensity::from_rho2(4, q(1, 10));
  CHECK(s.rho1() == q(2, 5));
  CHECK_THROWS(SymmetricDensity::from_rho2(12, q(1, 10)));
  CHECK_THROWS(SymmetricDensity::from_rho2(4, q(-1, 10)));
  CHECK(SymmetricDensity::uniform(5).rho2() == q(1, 5));
}

TEST_CASE("expected phi") {
  CHECK(expected_phi_uniform(Params(3, 1)) == q(-4, 9));
  CHECK(expected_phi_uniform(Params(4, 1)) == q(-1, 4));
  CHECK(expected_phi(Params(4, 1), SymmetricDensity::from_rho2(4, q(1, 4))) == q(-1, 4));
  CHECK(weight_polynomial_q(Params(4, 1), q(1, 2), 0) / 3 == q(1, 2));
  CHECK(expected_phi(Params(6, 2), SymmetricDensity::uniform(6)) == expected_phi_uniform(Params(6, 2)));
  CHECK(expected_phi_in_rho2(Params(4, 1)) == Polynomial{q(1, 2), -4, 4});
  CHECK(expected_phi_in_rho2(Params(4, 1)).to_string("r").find("4") != std::string::npos);
  for (int k = 0; k <= 50; ++k) {
    const Rational r = q(k, 100);
    CHECK(expected_phi_special(r) == expected_phi_in_rho2(Params(4, 1))(r));
  }
}

TEST_CASE("Q matches the pair-sum oracle, including outside the valid simplex") {
  for (int F = 2; F <= 12; ++F)
    for (int t = 1; t < F; ++t)
      for (int k = 1; k <= 49; k += 4) {
        const Rational rho2 = q(k, 100);
        const Rational rho1 = (1 - (F - 2) * rho2) / 2;
        const Rational raw = oracle::pair_sum_expected_phi(t, symmetric_vector(F, rho1, rho2));
        CHECK(weight_polynomial_q(Params(F, t), rho1, rho2) / 3 == raw);
        if (rho1 > 0) CHECK(expected_phi(Params(F, t), SymmetricDensity::from_rho2(F, rho2)) == raw);
      }
}

TEST_CASE("uniform expected phi matches the pair-sum oracle on a wide range") {
  for (int t = 1; t <= 20; ++t)
    for (int F = t + 1; F <= 44; F += 3) {
      std::vector<Rational> u(static_cast<std::size_t>(F), q(1, F));
      CHECK(expected_phi_uniform(Params(F, t)) == oracle::pair_sum_expected_phi(t, u));
    }
}

TEST_CASE("contribution bounds and margins") {
  const auto b = contribution_bounds_uniform(Params(4, 1));
  CHECK(b.annihilation == q(1, 16));
  CHECK(b.blockade_formation == q(1, 24));
  CHECK(b.blockade_increase == q(1, 32));
  CHECK(contribution_bounds_uniform(Params(4, 1), BlockadeFormationBound::Stated).blockade_formation == q(1, 16));

  const auto m4 = fixation_margin_uniform(Params(4, 1));
  CHECK(m4.margin == -264);
  CHECK(m4.terms == std::array<Rational, 4>{-576, 144, 96, 72});
  CHECK_FALSE(m4.fixates());
  const auto m10 = fixation_margin_uniform(Params(10, 2));
  CHECK(m10.margin == 9048);
  CHECK(m10.terms == std::array<Rational, 4>{2160, 1968, 1248, 3672});
  CHECK(m10.fixates());

  for (int F = 2; F <= 20; ++F)
    for (int t = 1; t < F; ++t) {
      const Params p(F, t);
      const auto m = fixation_margin_uniform(p);
      CHECK(m.margin == oracle::uniform_margin(F, t));
      CHECK(m.margin == 36 * F * F * F * (expected_phi_uniform(p) + contribution_bounds_uniform(p).total()));
      CHECK(m.margin == fixation_margin_uniform(Rational(F), Rational(t)).margin);
    }
}

TEST_CASE("asymptotic slope polynomials are the limits of the margin") {
  const auto margin = [](const mpq_class& F, const mpq_class& t) { return fixation_margin_uniform(F, t).margin; };
  const Polynomial with = slope_polynomial_with_contributions();
  for (int k = 0; k <= 20; ++k) {
    const Rational x = q(k, 40);
    CHECK(oracle::limit_slope(margin, x) == with(x));
    const auto phi_only = [](const mpq_class& F, const mpq_class& t) {
      return fixation_margin_uniform(F, t).terms[0];
    };
    CHECK(oracle::limit_slope(phi_only, x) == 12 * slope_polynomial_weight_only()(x));
  }
  const Polynomial expect{12, -72, 90, -60, 27};
  CHECK(with == expect);
}

TEST_CASE("asymptotic roots") {
  const auto roots = asymptotic_slope_roots();
  CHECK(std::abs(roots.c_minus.midpoint() - 0.20630) <= 5e-6);
  CHECK(std::abs(roots.c_plus.midpoint() - 0.21851) <= 5e-6);
  CHECK(roots.c_minus.upper < roots.c_plus.lower);
  CHECK(roots.c_minus.width() <= q(1, 1000000000000));
  const Polynomial w = slope_polynomial_weight_only();
  CHECK(w(roots.c_minus.lower) * w(roots.c_minus.upper) <= 0);
  const double cross = oracle::bisect([](double x) { return slope_polynomial_with_contributions()(x); }, 0.0, 0.5);
  CHECK(std::abs(cross - roots.c_plus.midpoint()) < 1e-11);
}

TEST_CASE("polynomial P") {
  CHECK(polynomial_p(Rational(0)) == 9000);
  CHECK(polynomial_p(q(1, 2)) == q(-57835, 8));
  CHECK(polynomial_p(q(2134, 10000)) > 0);
  const Polynomial d = polynomial_p().derivative();
  for (int k = 0; k <= 5000; ++k) CHECK(d(k * 1e-4) < 0);
  const auto root = root_p();
  CHECK(root.lower > q(2134, 10000));
  CHECK(root.width() <= q(1, 1000000000000));
  CHECK(polynomial_p(root.lower) > 0);
  CHECK(polynomial_p(root.upper) < 0);
  CHECK(fixation_threshold_special().lower == root.lower);
  CHECK(to_double(root.lower) > (2 - std::numbers::sqrt2) / 4);
}

TEST_CASE("special contribution bounds") {
  const auto zero = contribution_bounds_special(0);
  CHECK(zero.annihilation == 0);
  CHECK(zero.blockade_formation == 0);
  CHECK(zero.blockade_increase == 0);
  CHECK(contribution_bounds_special(q(1, 4)).annihilation == q(479, 6120));
  CHECK_THROWS_AS(contribution_bounds_special(q(3, 5)), std::domain_error);
  for (int k = 0; k <= 500; ++k) {
    const auto b = contribution_bounds_special(q(k, 1000));
    CHECK(b.annihilation >= 0);
    CHECK(b.blockade_formation >= 0);
    CHECK(b.blockade_increase >= 0);
  }
  CHECK(expected_phi_special(q(1, 4)) + contribution_bounds_special(q(1, 4)).total() < 0);
  const auto combined = combined_special_root();
  const auto root = root_p();
  CHECK(combined.lower > q(2134, 10000));
  CHECK(std::abs(combined.midpoint() - root.midpoint()) < 1e-3);
  // The combined bound and P / 150 are close but not the same polynomial.
  CHECK(combined_special_bound(q(1, 5)) != polynomial_p(q(1, 5)) / 150);
}

TEST_CASE("mean-field exponent") {
  CHECK(mean_field_psi(0.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(mean_field_psi(0.5) == doctest::Approx(0.375));
  CHECK(mean_field_psi(1e-6) / (2e-6 / std::numbers::pi) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK_THROWS_AS(mean_field_psi(1.5), std::domain_error);
}

TEST_CASE("phase diagram") {
  const auto cells = phase_diagram(20);
  auto find = [&](int F, int t) {
    for (const auto& c : cells)
      if (c.opinions == F && c.theta == t) return c;
    FAIL("cell missing");
    return cells.front();
  };
  CHECK(find(3, 1).phase == Phase::Fluctuation);
  CHECK(find(10, 2).phase == Phase::FixationProved);
  CHECK(find(10, 2).margin == 9048);
  CHECK(find(4, 1).phase == Phase::Unresolved);
  CHECK(to_string(Phase::FixationProved) == "fixation-proved");
  std::size_t expected = 0;
  for (int F = 2; F <= 20; ++F) expected += static_cast<std::size_t>(F - 1);
  CHECK(cells.size() == expected);
}
