#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <string>

#include "polya/error.hpp"

namespace polya {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// Default comparison tolerance for float-mode assertions.
inline constexpr double kDefaultTol = 1e-12;

// "p" when the denominator is 1, "p/q" otherwise; q is always positive.
std::string format_rational(const Rat& r);

// Accepts "p" and "p/q" with an optional leading sign. Throws ParseError.
Rat parse_rational(const std::string& s);

inline double to_double(const Rat& r) { return r.template convert_to<double>(); }

// Glue shared by the exact and float instantiations of the core types.
// Exact scalars compare with ==, float scalars within an absolute tolerance.
template <class S>
struct scalar_traits;

template <>
struct scalar_traits<Rat> {
  static constexpr bool exact = true;
  static bool eq(const Rat& a, const Rat& b, double /*tol*/) { return a == b; }
  static Rat abs(const Rat& a) { return a < 0 ? Rat(-a) : a; }
  static double as_double(const Rat& a) { return to_double(a); }
  static std::string str(const Rat& a) { return format_rational(a); }
};

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static bool eq(double a, double b, double tol) { return std::fabs(a - b) <= tol; }
  static double abs(double a) { return std::fabs(a); }
  static double as_double(double a) { return a; }
  static std::string str(double a) { return std::to_string(a); }
};

}  // namespace polya
