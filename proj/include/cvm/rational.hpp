#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace cvm {

using Rational = mpq_class;

/// Always "p/q", including "0/1" and "3/1".
std::string to_fraction_string(const Rational& value);

double to_double(const Rational& value);

/// Accepts "p/q", "-7", or a plain decimal such as "0.05" (converted exactly).
Rational parse_rational(std::string_view text);

} // namespace cvm
