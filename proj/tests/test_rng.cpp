#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "fptlab/rng.hpp"

using namespace fptlab;

// Published Philox4x32-10 known-answer vectors.
TEST(Philox, KnownAnswers) {
  EXPECT_EQ(philox4x32_10({0, 0, 0, 0}, {0, 0}),
            (Philox4x32Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}),
            (Philox4x32Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}),
            (Philox4x32Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(CounterRng, PureFunctionOfCoordinates) {
  const CounterRng a(7, 3, Stream::Diffusion), b(7, 3, Stream::Diffusion);
  EXPECT_EQ(a.uniform(11), b.uniform(11));
  EXPECT_NE(a.uniform(11), CounterRng(7, 4, Stream::Diffusion).uniform(11));
  EXPECT_NE(a.uniform(11), CounterRng(7, 3, Stream::Jumps).uniform(11));
  EXPECT_NE(a.uniform(11), CounterRng(8, 3, Stream::Diffusion).uniform(11));
}

TEST(CounterRng, UniformsInOpenUnitInterval) {
  const CounterRng r(1, 0, Stream::Synthetic);
  double sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const auto [u, v] = r.uniform_pair(i);
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_GT(v, 0.0);
    ASSERT_LT(v, 1.0);
    sum += u + v;
  }
  EXPECT_NEAR(sum / (2 * n), 0.5, 4 * std::sqrt(1.0 / 12 / (2 * n)));
}

TEST(CounterRng, NormalMoments) {
  const CounterRng r(2, 0, Stream::Synthetic);
  const int n = 40000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal(i);
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 4.0 * std::sqrt(2.0 / n));
  const auto [z0, z1] = r.normal_pair(5);
  EXPECT_EQ(z0, r.normal(10));
  EXPECT_EQ(z1, r.normal(11));
}
