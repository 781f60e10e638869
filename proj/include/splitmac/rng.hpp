#pragma once
// Deterministic random streams.
//
// std::mt19937_64's raw output sequence is pinned by the C++ standard, but the
// standard <random> distributions are not reproducible across library
// implementations.  Every transform used in this project is therefore spelled
// out explicitly on top of the raw 64-bit stream:
//   - uniform doubles take the top 53 bits of one engine draw,
//   - normals use the Box-Muller transform and consume exactly two uniform
//     draws per call (the second variate is never cached),
//   - bounded integers use rejection sampling (unbiased).
// splitmix64 derives independent substream seeds from a master seed.

#include <cmath>
#include <cstdint>
#include <random>

namespace splitmac {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on [lo, hi); consumes one draw.
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  // Gaussian via Box-Muller; consumes exactly two draws.
  double normal(double mean, double stddev) {
    const double u1 = 1.0 - uniform01();  // (0, 1]: keeps the log finite
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(kTwoPi * u2);
  }

  // Uniform integer in [0, n); unbiased rejection sampling.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0ull - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

 private:
  static constexpr double kTwoPi = 6.283185307179586476925286766559;
  std::mt19937_64 engine_;
};

}  // namespace splitmac
