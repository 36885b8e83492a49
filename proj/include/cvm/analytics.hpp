#pragma once

// Exact evaluation of the closed-form fixation/fluctuation criteria.
//
// All formulas are evaluated in rational arithmetic. The weight of an edge
// whose initial pile has j particles is -j for an active pile (j <= theta)
// and j - 2 theta for a blockade; a positive mean weight (plus the
// contribution lower bounds of annihilation, blockade formation and blockade
// increase events) implies fixation of the one-dimensional process.

#include "cvm/model.hpp"
#include "cvm/polynomial.hpp"
#include "cvm/rational.hpp"

#include <array>
#include <string>
#include <vector>

namespace cvm {

struct PowerSums {
  Rational s1;  // sum of j
  Rational s2;  // sum of j^2
  Rational s3;  // sum of j^3

  friend bool operator==(const PowerSums&, const PowerSums&) = default;
};

/// Sums over j = 1..theta. Throws std::invalid_argument for theta < 0.
PowerSums sums(int theta);

/// n(n+1)/2 for any integer n; for n < 0 this is the polynomial extension
/// (which is what the closed forms need when F <= 2 theta + 1).
Rational triangular(long n);

class WeightFunction {
 public:
  explicit WeightFunction(int theta);
  int theta() const noexcept { return theta_; }
  /// Weight of an edge carrying |xi| = j particles (j >= 0).
  int operator()(int j) const;

 private:
  int theta_;
};

/// rho_1 = rho_F and rho_2 = ... = rho_{F-1}, with 2 rho_1 + (F-2) rho_2 = 1.
class SymmetricDensity {
 public:
  /// rho_1 derived from rho_2; requires rho_1 > 0 and rho_2 >= 0.
  static SymmetricDensity from_rho2(int opinions, const Rational& rho2);
  static SymmetricDensity uniform(int opinions);

  int opinions() const noexcept { return opinions_; }
  const Rational& rho1() const noexcept { return rho1_; }
  const Rational& rho2() const noexcept { return rho2_; }

  /// Throws if rho_2 = 0 is not a valid sampling law (it is for F = 2).
  DensityVector to_density() const;

 private:
  SymmetricDensity(int opinions, Rational rho1, Rational rho2);
  int opinions_;
  Rational rho1_;
  Rational rho2_;
};

/// P(|xi_0(e)| = j) = 2 sum_i rho_i rho_{i+j} for j >= 1 and sum_i rho_i^2
/// for j = 0. Throws std::out_of_range unless 0 <= j <= F - 1.
Rational edge_type_prob(const Params& params, const DensityVector& density, int j);

/// Closed form under the symmetric law; 1 <= j <= F - 1.
Rational edge_type_prob(const Params& params, const SymmetricDensity& density, int j);

/// Q(X, Y) with X = rho_1 and Y = rho_2. Defined for any rationals.
Rational weight_polynomial_q(const Params& params, const Rational& x, const Rational& y);

/// E phi(e) = Q(rho_1, rho_2) / 3.
Rational expected_phi(const Params& params, const SymmetricDensity& density);

/// E phi(e) as a polynomial in rho_2 along 2 rho_1 + (F-2) rho_2 = 1.
Polynomial expected_phi_in_rho2(const Params& params);

/// E phi(e) under the uniform law rho_j = 1/F.
Rational expected_phi_uniform(const Params& params);

/// The blockade-formation bound appears with factor (2F - 5 theta - 2) at the
/// end of its derivation and in the combined inequality, and with
/// (2F - 5 theta - 1) in its headline statement.
enum class BlockadeFormationBound { Derived, Stated };

struct ContributionBounds {
  Rational annihilation;        // f(A)
  Rational blockade_formation;  // f(B)
  Rational blockade_increase;   // f(C)

  Rational total() const { return annihilation + blockade_formation + blockade_increase; }
};

ContributionBounds contribution_bounds_uniform(
    const Params& params, BlockadeFormationBound variant = BlockadeFormationBound::Derived);

/// Four-term fixation inequality under the uniform law. The margin equals
/// 36 F^3 (E phi + f(A) + f(B) + f(C)) with the derived f(B).
struct FixationMargin {
  std::array<Rational, 4> terms;  // weight, annihilation, formation, increase
  Rational margin;

  bool fixates() const { return margin > 0; }
};

FixationMargin fixation_margin_uniform(const Params& params);
/// Same inequality with real-valued (rational) F and theta.
FixationMargin fixation_margin_uniform(const Rational& opinions, const Rational& theta);

/// (1 - 2X)^3 - 6X^2(1 - X): sign of E phi as F -> infinity with theta = X F.
Polynomial slope_polynomial_weight_only();
/// Limit of margin / F^4 with theta = X F, i.e. the sum of the four
/// leading-order terms; equals 12(1 - 2X)^3 + 9X^2(3X^2 + 4X - 6).
Polynomial slope_polynomial_with_contributions();

struct SlopeRoots {
  RootBracket c_minus;
  RootBracket c_plus;
};

/// Both roots bisected on (0, 1/2) to bracket width <= 1e-12.
SlopeRoots asymptotic_slope_roots();

/// Lower bounds for F = 4, theta = 1 as functions of rho_2 in [0, 1/2].
/// Throws std::domain_error outside that interval.
ContributionBounds contribution_bounds_special(const Rational& rho2);

/// E phi for F = 4, theta = 1: 4 rho_2^2 - 4 rho_2 + 1/2.
Rational expected_phi_special(const Rational& rho2);

/// 3000X^6 - 8204X^5 - 23080X^4 + 115251X^3 - 37635X^2 - 39150X + 9000.
Polynomial polynomial_p();
Rational polynomial_p(const Rational& x);

/// Root of P on (0, 1/2), bracket width <= 1e-12.
RootBracket root_p();

/// Largest rho_2 certified for fixation when F = 4 and theta = 1: the root of P.
RootBracket fixation_threshold_special();

/// (5 rho_2 + 20)(3 rho_2 + 6)(E phi + f(A) + f(B) + f(C)) evaluated directly
/// from the F = 4 contribution bounds.
Rational combined_special_bound(const Rational& rho2);
RootBracket combined_special_root();

/// Mean-field domain-length exponent for F = 3, theta = 1; reference only,
/// this prediction does not hold for the one-dimensional process.
/// Throws std::domain_error unless 0 <= rho2 <= 1.
double mean_field_psi(double rho2);

enum class Phase { Fluctuation, FixationProved, Unresolved };

std::string to_string(Phase phase);

struct PhaseCell {
  int opinions;
  int theta;
  Phase phase;
  Rational margin;  // fixation margin under the uniform law
};

/// Every (F, theta) with 2 <= F <= max_opinions and 1 <= theta < F.
std::vector<PhaseCell> phase_diagram(int max_opinions);

} // namespace cvm
