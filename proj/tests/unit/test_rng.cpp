#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "poismix/rng.hpp"

using namespace poismix;

TEST(Philox, KnownAnswerZero) {
  const auto out = Philox4x32::encrypt({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (Philox4x32::Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerAllOnes) {
  const auto out = Philox4x32::encrypt({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out, (Philox4x32::Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPiDigits) {
  const auto out = Philox4x32::encrypt({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out, (Philox4x32::Block{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Philox, StreamsAreReproducible) {
  Rng a = make_stream(7, 3, StreamTag::configuration);
  Rng b = make_stream(7, 3, StreamTag::configuration);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(Philox, StreamsAreDistinct) {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t replica = 0; replica < 50; ++replica)
    for (auto tag : {StreamTag::configuration, StreamTag::mixture_noise, StreamTag::auxiliary,
                     StreamTag::second_configuration, StreamTag::bootstrap})
      firsts.insert(make_stream(11, replica, tag)());
  EXPECT_EQ(firsts.size(), 250u);
  EXPECT_NE(make_stream(1, 0)(), make_stream(2, 0)());
}

TEST(Philox, Uniform01RangeAndMean) {
  Rng rng = make_stream(5, 0);
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = uniform01(rng);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  const double se = std::sqrt(1.0 / 12.0 / n);
  EXPECT_LT(std::abs(sum / n - 0.5), 4 * se);
}
