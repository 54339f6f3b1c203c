#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "orlicz/rng.hpp"

using namespace orlicz;

// Known-answer vectors of the Philox4x32-10 reference implementation.
TEST(Philox, KnownAnswers) {
  EXPECT_EQ(philox4x32({0, 0, 0, 0}, {0, 0}), (PhiloxCounter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}),
            (PhiloxCounter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}),
            (PhiloxCounter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(CounterRng, PureFunctionOfSeedStreamCounter) {
  const CounterRng a({7, 3}), b({7, 3}), c({7, 4}), d({8, 3});
  EXPECT_EQ(a.block(12345), b.block(12345));
  EXPECT_NE(a.block(12345), c.block(12345));
  EXPECT_NE(a.block(12345), d.block(12345));
  EXPECT_NE(a.block(0), a.block(1));
}

TEST(CounterRng, UnitIsOpenInterval) {
  EXPECT_GT(CounterRng::unit(0, 0), 0.0);
  EXPECT_LT(CounterRng::unit(0xffffffffu, 0xffffffffu), 1.0);
}

TEST(CounterRng, UniformMoments) {
  const CounterRng r({1, 0});
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto w = r.block(std::uint64_t(i));
    const double u = CounterRng::unit(w[0], w[1]);
    s += u;
    s2 += u * u;
  }
  EXPECT_NEAR(s / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(s2 / n, 1.0 / 3.0, 0.003);
}

TEST(DeriveStream, DistinctAndDeterministic) {
  const SeedSpec base{99, 0};
  std::set<std::uint64_t> ids;
  for (std::uint64_t salt = 0; salt < 1000; ++salt) ids.insert(derive_stream(base, salt).stream_id);
  EXPECT_EQ(ids.size(), 1000u);
  EXPECT_EQ(derive_stream(base, 5).stream_id, derive_stream(base, 5).stream_id);
  EXPECT_EQ(derive_stream(base, 5).seed, 99u);
}
