#include "polya/rng.hpp"

#include <cmath>
#include <numbers>

#include "polya/error.hpp"

namespace polya {

std::uint64_t SplitMix64::below(std::uint64_t n) {
  if (n == 0) throw ValidationError("below: n must be positive");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t r;
  do {
    r = next();
  } while (r >= limit);
  return r % n;
}

double SplitMix64::normal() {
  // u1 in (0, 1] keeps the log finite.
  const double u1 = static_cast<double>(bits53() + 1) * 0x1.0p-53;
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double SplitMix64::gamma(double shape) {
  if (!(shape > 0.0)) throw ValidationError("gamma: shape must be positive");
  if (shape < 1.0) {
    // Boost: Gamma(a) = Gamma(a+1) * U^(1/a).
    const double g = gamma(shape + 1.0);
    const double u = static_cast<double>(bits53() + 1) * 0x1.0p-53;
    return g * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

std::vector<double> SplitMix64::dirichlet(const std::vector<double>& alpha) {
  if (alpha.empty()) throw ValidationError("dirichlet: empty parameter vector");
  std::vector<double> out(alpha.size());
  double total = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    out[i] = gamma(alpha[i]);
    total += out[i];
  }
  if (total <= 0.0) {
    // All gammas underflowed; fall back to the mean direction.
    double s = 0.0;
    for (double a : alpha) s += a;
    for (std::size_t i = 0; i < alpha.size(); ++i) out[i] = alpha[i] / s;
    return out;
  }
  for (double& w : out) w /= total;
  return out;
}

}  // namespace polya
