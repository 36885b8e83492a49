#include "cvm/polynomial.hpp"

#include <sstream>
#include <stdexcept>

namespace cvm {

Polynomial::Polynomial(std::initializer_list<Rational> coefficients) : coeffs_(coefficients) {
  trim();
}

Polynomial::Polynomial(std::vector<Rational> coefficients) : coeffs_(std::move(coefficients)) {
  trim();
}

void Polynomial::trim() {
  for (auto& c : coeffs_) c.canonicalize();
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

Rational Polynomial::coefficient(int k) const {
  if (k < 0 || k >= static_cast<int>(coeffs_.size())) return 0;
  return coeffs_[static_cast<std::size_t>(k)];
}

Rational Polynomial::operator()(const Rational& x) const {
  Rational acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double Polynomial::operator()(double x) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + it->get_d();
  return acc;
}

Polynomial Polynomial::derivative() const {
  std::vector<Rational> out;
  for (std::size_t k = 1; k < coeffs_.size(); ++k)
    out.push_back(coeffs_[k] * static_cast<long>(k));
  return Polynomial(std::move(out));
}

Polynomial Polynomial::pow(unsigned exponent) const {
  Polynomial result({Rational(1)});
  for (unsigned i = 0; i < exponent; ++i) result *= *this;
  return result;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size(), Rational(0));
  for (std::size_t k = 0; k < other.coeffs_.size(); ++k) coeffs_[k] += other.coeffs_[k];
  trim();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) { return *this += -other; }

Polynomial& Polynomial::operator*=(const Polynomial& other) {
  if (coeffs_.empty() || other.coeffs_.empty()) {
    coeffs_.clear();
    return *this;
  }
  std::vector<Rational> out(coeffs_.size() + other.coeffs_.size() - 1, Rational(0));
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    for (std::size_t j = 0; j < other.coeffs_.size(); ++j) out[i + j] += coeffs_[i] * other.coeffs_[j];
  coeffs_ = std::move(out);
  trim();
  return *this;
}

Polynomial operator*(const Rational& c, Polynomial p) {
  for (auto& a : p.coeffs_) a *= c;
  p.trim();
  return p;
}

Polynomial operator-(Polynomial p) {
  for (auto& a : p.coeffs_) a = -a;
  return p;
}

std::string Polynomial::to_string(const std::string& variable) const {
  if (coeffs_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (int k = degree(); k >= 0; --k) {
    const Rational& c = coeffs_[static_cast<std::size_t>(k)];
    if (c == 0) continue;
    Rational mag = abs(c);
    if (first) {
      if (c < 0) out << "-";
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    first = false;
    const bool unit = mag == 1 && k > 0;
    if (!unit) out << mag.get_str();
    if (k > 0) {
      if (!unit) out << "*";
      out << variable;
      if (k > 1) out << "^" << k;
    }
  }
  return out.str();
}

RootBracket bisect_root(const std::function<Rational(const Rational&)>& f, Rational lower,
                        Rational upper, const Rational& max_width) {
  if (!(lower < upper)) throw std::invalid_argument("bisection needs lower < upper");
  const int s_lower = sgn(f(lower));
  const int s_upper = sgn(f(upper));
  if (s_lower == 0) return {lower, lower};
  if (s_upper == 0) return {upper, upper};
  if (s_lower == s_upper) throw std::invalid_argument("no sign change on the bisection interval");
  while (upper - lower > max_width) {
    Rational mid = (lower + upper) / 2;
    const int s_mid = sgn(f(mid));
    if (s_mid == 0) return {mid, mid};
    (s_mid == s_lower ? lower : upper) = mid;
  }
  return {lower, upper};
}

} // namespace cvm
