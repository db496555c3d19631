#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "qfilt/rng.hpp"

using namespace qfilt;

TEST_CASE("philox4x32-10 known answers") {
  // Reference vectors from the Random123 test suite.
  {
    const auto b = philox::generate(0, {0, 0, 0, 0});
    CHECK(b.x[0] == 0x6627e8d5u);
    CHECK(b.x[1] == 0xe169c58du);
    CHECK(b.x[2] == 0xbc57ac4cu);
    CHECK(b.x[3] == 0x9b00dbd8u);
  }
  {
    const auto b = philox::generate(0xffffffffffffffffull,
                                    {0xffffffffu, 0xffffffffu, 0xffffffffu,
                                     0xffffffffu});
    CHECK(b.x[0] == 0x408f276du);
    CHECK(b.x[1] == 0x41c83b0eu);
    CHECK(b.x[2] == 0xa20bc7c6u);
    CHECK(b.x[3] == 0x6d5451fdu);
  }
  {
    const auto b = philox::generate(0x299f31d0a4093822ull,
                                    {0x243f6a88u, 0x85a308d3u, 0x13198a2eu,
                                     0x03707344u});
    CHECK(b.x[0] == 0xd16cfe09u);
    CHECK(b.x[1] == 0x94fdccebu);
    CHECK(b.x[2] == 0x5001e420u);
    CHECK(b.x[3] == 0x24126ea1u);
  }
}

TEST_CASE("stream determinism and slot independence") {
  NoiseStream a(42), b(42), c(43);
  CHECK(a.gaussian(1, 2, 3) == b.gaussian(1, 2, 3));
  CHECK(a.uniform(1, 2, 3) == b.uniform(1, 2, 3));
  CHECK(a.gaussian(1, 2, 3) != c.gaussian(1, 2, 3));
  CHECK(a.gaussian(1, 2, 3) != a.gaussian(2, 2, 3));
  CHECK(a.gaussian(1, 2, 3) != a.gaussian(1, 3, 3));
  CHECK(a.gaussian(1, 2, 3) != a.gaussian(1, 2, 4));
  // gaussian and uniform at the same address use distinct blocks
  CHECK(a.gaussian(0, 0, 0) != a.uniform(0, 0, 0));
}

TEST_CASE("uniform range and gaussian moments") {
  NoiseStream s(7);
  double sum = 0.0, sum2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform(0, static_cast<std::uint32_t>(i), 0);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double g = s.gaussian(0, static_cast<std::uint32_t>(i), 1);
    sum += g;
    sum2 += g * g;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}
