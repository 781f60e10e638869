#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "splitmac/rng.hpp"

using splitmac::Rng;
using splitmac::splitmix64;

TEST_CASE("splitmix64 matches the reference outputs") {
  CHECK(splitmix64(0x0ull) == 0xe220a8397b1dcdafull);
  CHECK(splitmix64(0x1ull) == 0x910a2dec89025cc1ull);
  CHECK(splitmix64(0x2aull) == 0xbdd732262feb6e95ull);
  CHECK(splitmix64(0xdeadbeefull) == 0x4adfb90f68c9eb9bull);
}

TEST_CASE("splitmix64 is stateless and collision-spreading") {
  CHECK(splitmix64(1) == splitmix64(1));
  CHECK(splitmix64(1) != splitmix64(2));
  CHECK(splitmix64(splitmix64(1)) != splitmix64(1));
}

TEST_CASE("raw engine stream is the standard-pinned mt19937_64 sequence") {
  // The 10000th output of mt19937_64 seeded with the default constant is
  // pinned by the C++ standard; our engine seeded the same way must match.
  std::mt19937_64 reference(5489u);
  Rng rng(5489u);
  for (int i = 0; i < 9999; ++i) {
    reference();
    rng.next_u64();
  }
  CHECK(rng.next_u64() == reference());
  CHECK(rng.next_u64() == reference());
}

TEST_CASE("uniform01 lies in [0,1) and uses one draw per call") {
  Rng rng(123);
  Rng mirror(123);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(u == static_cast<double>(mirror.next_u64() >> 11) * 0x1.0p-53);
  }
}

TEST_CASE("uniform maps into the requested interval deterministically") {
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform(-3.0, 5.0);
    CHECK(x >= -3.0);
    CHECK(x < 5.0);
    CHECK(x == b.uniform(-3.0, 5.0));
  }
}

TEST_CASE("normal consumes exactly two draws per call") {
  Rng rng(42);
  Rng mirror(42);
  for (int i = 0; i < 50; ++i) {
    (void)rng.normal(0.0, 1.0);
    mirror.next_u64();
    mirror.next_u64();
  }
  CHECK(rng.next_u64() == mirror.next_u64());
}

TEST_CASE("normal sample moments approach the requested ones") {
  Rng rng(2024);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal(3.0, 2.0);
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(mean == Catch::Approx(3.0).margin(0.02));
  CHECK(std::sqrt(var) == Catch::Approx(2.0).epsilon(0.02));
}

TEST_CASE("below stays in range and is roughly uniform") {
  Rng rng(9);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t v = rng.below(7);
    REQUIRE(v < 7);
    ++counts[static_cast<std::size_t>(v)];
  }
  for (int c : counts)
    CHECK(static_cast<double>(c) / n == Catch::Approx(1.0 / 7).epsilon(0.05));
}

TEST_CASE("below handles n=1 without consuming unbounded draws") {
  Rng rng(1);
  for (int i = 0; i < 10; ++i) CHECK(rng.below(1) == 0);
}
