#pragma once

#include <cstdint>
#include <vector>

namespace polya {

// SplitMix64 (Steele/Lea/Vigna). Tiny, splittable-free 64-bit generator; a
// fixed seed fully determines every stream the library draws from.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Top 53 bits: the dyadic numerator of a uniform draw u = bits53 / 2^53.
  // Exact-mode samplers compare this against rational cumulative sums.
  std::uint64_t bits53() { return next() >> 11; }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(bits53()) * 0x1.0p-53; }

  // Unbiased integer in [0, n), n > 0.
  std::uint64_t below(std::uint64_t n);

  // Standard normal via Box-Muller; consumes two uniforms per call.
  double normal();

  // Gamma(shape, 1) via Marsaglia-Tsang squeeze, shape > 0.
  double gamma(double shape);

  std::vector<double> dirichlet(const std::vector<double>& alpha);

 private:
  std::uint64_t state_;
};

}  // namespace polya
