#pragma once

#include "cvm/rational.hpp"

#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

namespace cvm {

/// Dense univariate polynomial with exact rational coefficients,
/// coefficient k multiplying X^k.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(std::initializer_list<Rational> coefficients);
  explicit Polynomial(std::vector<Rational> coefficients);

  static Polynomial constant(const Rational& c) { return Polynomial({c}); }
  static Polynomial x() { return Polynomial({Rational(0), Rational(1)}); }

  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  /// Zero beyond the degree.
  Rational coefficient(int k) const;
  const std::vector<Rational>& coefficients() const noexcept { return coeffs_; }

  Rational operator()(const Rational& x) const;
  double operator()(double x) const;

  Polynomial derivative() const;
  Polynomial pow(unsigned exponent) const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(const Polynomial& other);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Polynomial& b) { return a *= b; }
  friend Polynomial operator*(const Rational& c, Polynomial p);
  friend Polynomial operator-(Polynomial p);
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.coeffs_ == b.coeffs_; }

  std::string to_string(const std::string& variable = "X") const;

 private:
  void trim();
  std::vector<Rational> coeffs_;
};

/// Closed interval [lower, upper] on which a function changes sign.
struct RootBracket {
  Rational lower;
  Rational upper;

  Rational width() const { return upper - lower; }
  double midpoint() const { return to_double((lower + upper) / 2); }
};

/// Exact bisection: requires f(lower) and f(upper) of strictly opposite sign
/// and returns a bracket of width <= max_width that still has that property
/// (or a degenerate bracket at an exact zero). Throws std::invalid_argument
/// when the initial interval is not a sign-change bracket.
RootBracket bisect_root(const std::function<Rational(const Rational&)>& f, Rational lower,
                        Rational upper, const Rational& max_width);

} // namespace cvm
