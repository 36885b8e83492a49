#include "cvm/rational.hpp"

#include <stdexcept>
#include <string>

namespace cvm {

std::string to_fraction_string(const Rational& value) {
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

double to_double(const Rational& value) { return value.get_d(); }

Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto first = s.find_first_not_of(" \t");
  auto last = s.find_last_not_of(" \t");
  if (first == std::string::npos) throw std::invalid_argument("empty rational");
  s = s.substr(first, last - first + 1);

  auto digits_only = [](std::string_view part, bool allow_sign) {
    if (part.empty()) return false;
    std::size_t i = 0;
    if (allow_sign && (part[0] == '-' || part[0] == '+')) i = 1;
    if (i == part.size()) return false;
    for (; i < part.size(); ++i)
      if (part[i] < '0' || part[i] > '9') return false;
    return true;
  };

  if (auto slash = s.find('/'); slash != std::string::npos) {
    std::string num = s.substr(0, slash);
    std::string den = s.substr(slash + 1);
    if (!digits_only(num, true) || !digits_only(den, false))
      throw std::invalid_argument("malformed rational '" + s + "'");
    if (num[0] == '+') num.erase(0, 1);
    mpz_class d(den);
    if (d == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
    Rational q(mpz_class(num), d);
    q.canonicalize();
    return q;
  }

  if (auto dot = s.find('.'); dot != std::string::npos) {
    std::string whole = s.substr(0, dot);
    std::string frac = s.substr(dot + 1);
    bool negative = !whole.empty() && whole[0] == '-';
    if (!whole.empty() && (whole[0] == '-' || whole[0] == '+')) whole.erase(0, 1);
    if (whole.empty()) whole = "0";
    if (!digits_only(whole, false) || (!frac.empty() && !digits_only(frac, false)))
      throw std::invalid_argument("malformed decimal '" + s + "'");
    mpz_class scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    mpz_class num = mpz_class(whole) * scale + (frac.empty() ? mpz_class(0) : mpz_class(frac));
    Rational q(negative ? mpz_class(-num) : num, scale);
    q.canonicalize();
    return q;
  }

  if (!digits_only(s, true)) throw std::invalid_argument("malformed rational '" + s + "'");
  if (s[0] == '+') s.erase(0, 1);
  return Rational(mpz_class(s));
}

} // namespace cvm
