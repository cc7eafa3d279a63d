#include "polya/rational.hpp"

#include <cctype>
#include <string_view>

namespace polya {

std::string format_rational(const Rat& r) {
  const Int num = numerator(r);
  const Int den = denominator(r);
  std::string s = num.str();
  if (den != 1) {
    s += "/";
    s += den.str();
  }
  return s;
}

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

Rat parse_rational(const std::string& s) {
  std::string_view v(s);
  bool negative = false;
  if (!v.empty() && (v.front() == '+' || v.front() == '-')) {
    negative = v.front() == '-';
    v.remove_prefix(1);
  }
  const auto slash = v.find('/');
  const std::string_view num_part = v.substr(0, slash);
  if (!all_digits(num_part)) {
    throw ParseError("invalid rational literal: '" + s + "'");
  }
  Int num{std::string(num_part)};
  Int den{1};
  if (slash != std::string_view::npos) {
    const std::string_view den_part = v.substr(slash + 1);
    if (!all_digits(den_part)) {
      throw ParseError("invalid rational literal: '" + s + "'");
    }
    den = Int{std::string(den_part)};
    if (den == 0) {
      throw ParseError("zero denominator in rational literal: '" + s + "'");
    }
  }
  Rat r(num, den);
  if (negative) r = -r;
  return r;
}

}  // namespace polya
