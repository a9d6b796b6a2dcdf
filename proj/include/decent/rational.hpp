#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace decent {

/// Exact rational used for every reported cost, weight, and frequency.
using Rational = boost::multiprecision::cpp_rational;

/// Accepts integers ("3", "-2"), decimals ("0.25", "1e-3", "2.5E2") and
/// fractions ("1/3"). Returns nullopt on anything else, including trailing
/// characters.
std::optional<Rational> parse_rational(std::string_view text);

/// "7/3" or "2"
std::string to_fraction_string(const Rational& r);

/// Fraction followed by a decimal approximation, e.g. "7/3 (2.333333)".
std::string to_display_string(const Rational& r, int digits = 6);

double to_double(const Rational& r);

/// True when r has a finite decimal expansion; fills `out` with it.
bool to_exact_decimal(const Rational& r, std::string& out);

}  // namespace decent
