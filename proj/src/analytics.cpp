#include "cvm/analytics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cvm {

namespace {

const Rational& root_tolerance() {
  static const Rational tol(1, 1'000'000'000'000L);
  return tol;
}

Rational r(long n) { return Rational(n); }

// Q(X, Y) written once for both scalar and polynomial arguments.
template <class T>
T q_form(const Params& p, const T& x, const T& y, const auto& lift) {
  const long F = p.opinions;
  const long th = p.threshold;
  const T blockade_mix = lift(r(2)) * x + lift(r(F - th - 2)) * y;
  const T centre_mix = lift(r(6)) * x + lift(r(F - 2 * th - 3)) * y;
  return lift(r(-6 * th * th)) * y * blockade_mix +
         lift(r(2) * triangular(F - 2 * th - 2)) * y * centre_mix +
         lift(r(6 * (F - 2 * th - 1))) * x * x;
}

Rational cube(const Rational& v) { return v * v * v; }

} // namespace

PowerSums sums(int theta) {
  if (theta < 0) throw std::invalid_argument("power sums need theta >= 0");
  const Rational t = theta;
  return {t * (t + 1) / 2, t * (t + 1) * (2 * t + 1) / 6, t * t * (t + 1) * (t + 1) / 4};
}

Rational triangular(long n) {
  Rational t = n;
  return t * (t + 1) / 2;
}

WeightFunction::WeightFunction(int theta) : theta_(theta) {
  if (theta < 1) throw std::invalid_argument("weight function needs theta >= 1");
}

int WeightFunction::operator()(int j) const {
  if (j < 0) throw std::invalid_argument("pile size must be nonnegative");
  return j <= theta_ ? -j : j - 2 * theta_;
}

SymmetricDensity::SymmetricDensity(int opinions, Rational rho1, Rational rho2)
    : opinions_(opinions), rho1_(std::move(rho1)), rho2_(std::move(rho2)) {
  if (opinions_ < 2) throw std::invalid_argument("symmetric density needs F >= 2");
  if (rho1_ <= 0) throw std::invalid_argument("symmetric density needs rho1 > 0");
  if (rho2_ < 0) throw std::invalid_argument("symmetric density needs rho2 >= 0");
  if (2 * rho1_ + (opinions_ - 2) * rho2_ != 1)
    throw std::invalid_argument("symmetric density violates 2 rho1 + (F-2) rho2 = 1");
}

SymmetricDensity SymmetricDensity::from_rho2(int opinions, const Rational& rho2) {
  const Rational effective = opinions == 2 ? Rational(0) : rho2;
  return SymmetricDensity(opinions, (1 - (opinions - 2) * effective) / 2, effective);
}

SymmetricDensity SymmetricDensity::uniform(int opinions) {
  return from_rho2(opinions, Rational(1, opinions));
}

DensityVector SymmetricDensity::to_density() const {
  if (opinions_ > 2 && rho2_ == 0)
    throw std::invalid_argument("rho2 = 0 is a limiting case, not a sampling law");
  return DensityVector::symmetric(opinions_, rho1_, rho2_);
}

Rational edge_type_prob(const Params& params, const DensityVector& density, int j) {
  const int F = params.opinions;
  if (density.opinions() != F) throw std::invalid_argument("density length differs from F");
  if (j < 0 || j > F - 1) throw std::out_of_range("pile size outside 0..F-1");
  Rational total = 0;
  for (int i = 1; i + j <= F; ++i) total += density[i] * density[i + j];
  return j == 0 ? total : 2 * total;
}

Rational edge_type_prob(const Params& params, const SymmetricDensity& density, int j) {
  const int F = params.opinions;
  if (density.opinions() != F) throw std::invalid_argument("density length differs from F");
  if (j < 1 || j > F - 1) throw std::out_of_range("pile size outside 1..F-1");
  const Rational& r1 = density.rho1();
  const Rational& r2 = density.rho2();
  if (j == F - 1) return 2 * r1 * r1;
  return 4 * r1 * r2 + 2 * (F - j - 2) * r2 * r2;
}

Rational weight_polynomial_q(const Params& params, const Rational& x, const Rational& y) {
  return q_form(params, x, y, [](const Rational& c) { return c; });
}

Rational expected_phi(const Params& params, const SymmetricDensity& density) {
  if (density.opinions() != params.opinions)
    throw std::invalid_argument("density length differs from F");
  return weight_polynomial_q(params, density.rho1(), density.rho2()) / 3;
}

Polynomial expected_phi_in_rho2(const Params& params) {
  const Polynomial y = Polynomial::x();
  const Polynomial x({Rational(1, 2), Rational(-(params.opinions - 2)) / 2});
  return Rational(1, 3) * q_form(params, x, y, [](const Rational& c) { return Polynomial::constant(c); });
}

Rational expected_phi_uniform(const Params& params) {
  const Rational F = params.opinions;
  const Rational th = params.threshold;
  const Rational gap = F - 2 * th;
  return (-6 * (F - th) * th * th + (gap - 1) * gap * (gap + 1)) / (3 * F * F);
}

ContributionBounds contribution_bounds_uniform(const Params& params, BlockadeFormationBound variant) {
  const Rational F = params.opinions;
  const Rational th = params.threshold;
  const Rational scale = th * (th + 1) / cube(F);
  const long shift = variant == BlockadeFormationBound::Derived ? 2 : 1;
  ContributionBounds b;
  b.annihilation = scale / 9 * (2 * F * (2 * th + 1) - 3 * th * (th + 1));
  b.blockade_formation =
      scale / 9 * (3 * (th + 1) * (2 * F - 5 * th - shift) + 2 * (2 * th + 1) * (3 * th - F + 2));
  b.blockade_increase = scale / 12 *
                        (6 * F * (F - 2 * th - 1) - 2 * (2 * th + 1) * (2 * F - 2 * th - 1) +
                         9 * th * (th + 1));
  return b;
}

FixationMargin fixation_margin_uniform(const Rational& F, const Rational& th) {
  const Rational pairs = th * (th + 1);
  FixationMargin m;
  m.terms[0] = 12 * F * ((F - 2 * th - 1) * (F - 2 * th) * (F - 2 * th + 1) - 6 * th * th * (F - th));
  m.terms[1] = 4 * pairs * (2 * F * (2 * th + 1) - 3 * pairs);
  m.terms[2] = 4 * pairs * (3 * (th + 1) * (2 * F - 5 * th - 2) + 2 * (2 * th + 1) * (3 * th - F + 2));
  m.terms[3] = 3 * pairs * (6 * F * (F - 2 * th - 1) - 2 * (2 * th + 1) * (2 * F - 2 * th - 1) + 9 * pairs);
  m.margin = m.terms[0] + m.terms[1] + m.terms[2] + m.terms[3];
  return m;
}

FixationMargin fixation_margin_uniform(const Params& params) {
  return fixation_margin_uniform(Rational(params.opinions), Rational(params.threshold));
}

Polynomial slope_polynomial_weight_only() {
  const Polynomial X = Polynomial::x();
  const Polynomial one = Polynomial::constant(1);
  const Polynomial lean = one - Rational(2) * X;
  return lean.pow(3) - Rational(6) * X * X * (one - X);
}

Polynomial slope_polynomial_with_contributions() {
  const Polynomial X = Polynomial::x();
  const Polynomial one = Polynomial::constant(1);
  const Polynomial X2 = X * X;
  auto c = [](long v) { return Polynomial::constant(Rational(v)); };
  const Polynomial weight = Rational(12) * slope_polynomial_weight_only();
  const Polynomial annihilation = Rational(4) * X2 * (c(4) * X - c(3) * X2);
  const Polynomial formation =
      Rational(4) * X2 * (c(3) * X * (c(2) - c(5) * X) + c(4) * X * (c(3) * X - one));
  const Polynomial increase =
      Rational(3) * X2 * (c(6) * (one - c(2) * X) - c(4) * X * (c(2) - c(2) * X) + c(9) * X2);
  return weight + annihilation + formation + increase;
}

SlopeRoots asymptotic_slope_roots() {
  const Polynomial minus = slope_polynomial_weight_only();
  const Polynomial plus = slope_polynomial_with_contributions();
  return {bisect_root([&](const Rational& x) { return minus(x); }, 0, Rational(1, 2), root_tolerance()),
          bisect_root([&](const Rational& x) { return plus(x); }, 0, Rational(1, 2), root_tolerance())};
}

ContributionBounds contribution_bounds_special(const Rational& rho2) {
  if (rho2 < 0 || rho2 > Rational(1, 2))
    throw std::domain_error("rho2 must lie in [0, 1/2] for F = 4, theta = 1");
  const Rational& p = rho2;
  const Rational rho1 = Rational(1, 2) - p;
  const Rational fast_escape = p * (1 - p) / (5 * p + 20);
  const Rational slow_escape = p * (1 - p) / (3 * p + 6);
  ContributionBounds b;
  b.annihilation = Rational(181, 225) * p * p +
                   2 * rho1 * rho1 * p * (1 - Rational(26, 75) * p - 2 * fast_escape);
  b.blockade_formation = 4 * rho1 * p * p * (Rational(203, 225) - Rational(13, 75) * p + fast_escape);
  b.blockade_increase = 4 * rho1 * rho1 * p * (1 - Rational(5, 9) * p - 2 * slow_escape);
  return b;
}

Rational expected_phi_special(const Rational& rho2) {
  return 4 * rho2 * rho2 - 4 * rho2 + Rational(1, 2);
}

Polynomial polynomial_p() {
  return Polynomial({r(9000), r(-39150), r(-37635), r(115251), r(-23080), r(-8204), r(3000)});
}

Rational polynomial_p(const Rational& x) {
  static const Polynomial p = polynomial_p();
  return p(x);
}

RootBracket root_p() {
  return bisect_root([](const Rational& x) { return polynomial_p(x); }, 0, Rational(1, 2),
                     root_tolerance());
}

RootBracket fixation_threshold_special() { return root_p(); }

Rational combined_special_bound(const Rational& rho2) {
  const ContributionBounds b = contribution_bounds_special(rho2);
  return (5 * rho2 + 20) * (3 * rho2 + 6) * (expected_phi_special(rho2) + b.total());
}

RootBracket combined_special_root() {
  return bisect_root([](const Rational& x) { return combined_special_bound(x); }, 0,
                     Rational(1, 2), root_tolerance());
}

double mean_field_psi(double rho2) {
  if (!(rho2 >= 0.0 && rho2 <= 1.0)) throw std::domain_error("mean_field_psi needs 0 <= rho2 <= 1");
  const double angle = std::acos((1.0 - 2.0 * rho2) / std::numbers::sqrt2);
  return -0.125 + 2.0 / (std::numbers::pi * std::numbers::pi) * angle * angle;
}

std::string to_string(Phase phase) {
  switch (phase) {
    case Phase::Fluctuation: return "fluctuation";
    case Phase::FixationProved: return "fixation-proved";
    case Phase::Unresolved: return "unresolved";
  }
  return "unresolved";
}

std::vector<PhaseCell> phase_diagram(int max_opinions) {
  if (max_opinions < 2) throw std::invalid_argument("phase diagram needs F_max >= 2");
  std::vector<PhaseCell> cells;
  for (int F = 2; F <= max_opinions; ++F) {
    for (int th = 1; th < F; ++th) {
      const Params params(F, th);
      FixationMargin m = fixation_margin_uniform(params);
      Phase phase = params.fluctuation_regime() ? Phase::Fluctuation
                    : m.fixates()               ? Phase::FixationProved
                                                : Phase::Unresolved;
      cells.push_back({F, th, phase, std::move(m.margin)});
    }
  }
  return cells;
}

} // namespace cvm
