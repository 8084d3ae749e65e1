#include <random>

#include <gtest/gtest.h>

#include "atp/error.hpp"
#include "atp/serial.hpp"
#include "atp/wavelet.hpp"
#include "test_util.hpp"

namespace atp {
namespace {

TEST(HaarDwt2, ConstantBlock) {
  const HaarBands b = haar_dwt2(GrayImage(2, 2, 1.0));
  EXPECT_EQ(b.a(0, 0), 2.0);
  EXPECT_EQ(b.h(0, 0), 0.0);
  EXPECT_EQ(b.v(0, 0), 0.0);
  EXPECT_EQ(b.d(0, 0), 0.0);
}

TEST(HaarDwt2, BlockFormulaOrientation) {
  const HaarBands b = haar_dwt2(GrayImage(2, 2, std::vector<double>{4, 2, 2, 0}));
  EXPECT_EQ(b.a(0, 0), 4.0);
  EXPECT_EQ(b.h(0, 0), 2.0);
  EXPECT_EQ(b.v(0, 0), 2.0);
  EXPECT_EQ(b.d(0, 0), 0.0);

  // Distinct entries pin down which difference lands in h and which in v.
  const HaarBands c = haar_dwt2(GrayImage(2, 2, std::vector<double>{1, 2, 3, 4}));
  EXPECT_EQ(c.a(0, 0), 5.0);
  EXPECT_EQ(c.h(0, 0), -2.0);
  EXPECT_EQ(c.v(0, 0), -1.0);
  EXPECT_EQ(c.d(0, 0), 0.0);
}

TEST(HaarIdwt2, InvertsHandCases) {
  const GrayImage one(1, 1, 2.0), zero(1, 1, 0.0);
  EXPECT_EQ(haar_idwt2({one, zero, zero, zero}), GrayImage(2, 2, 1.0));
  const HaarBands b{GrayImage(1, 1, 4.0), GrayImage(1, 1, 2.0), GrayImage(1, 1, 2.0), zero};
  EXPECT_EQ(haar_idwt2(b), GrayImage(2, 2, std::vector<double>{4, 2, 2, 0}));
  const HaarBands c{GrayImage(1, 1, 5.0), GrayImage(1, 1, -2.0), GrayImage(1, 1, -1.0), zero};
  EXPECT_EQ(haar_idwt2(c), GrayImage(2, 2, std::vector<double>{1, 2, 3, 4}));
}

TEST(HaarIdwt2, RejectsMismatchedBands) {
  const HaarBands b{GrayImage(2, 2), GrayImage(2, 2), GrayImage(2, 3), GrayImage(2, 2)};
  try {
    haar_idwt2(b);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(HaarDwt2, RoundTripBothWays) {
  std::mt19937_64 gen(21);
  std::uniform_int_distribution<std::size_t> half(1, 32);
  for (int trial = 0; trial < 200; ++trial) {
    const GrayImage x = testing::random_image(gen, 2 * half(gen), 2 * half(gen));
    const GrayImage back = haar_idwt2(haar_dwt2(x));
    EXPECT_LE(testing::max_abs_diff(back, x), 1e-12 * 255.0);

    const std::size_t r = half(gen), c = half(gen);
    const HaarBands b{testing::random_image(gen, r, c, -100, 100), testing::random_image(gen, r, c, -100, 100),
                      testing::random_image(gen, r, c, -100, 100), testing::random_image(gen, r, c, -100, 100)};
    const HaarBands again = haar_dwt2(haar_idwt2(b));
    EXPECT_LE(testing::max_abs_diff(again.a, b.a), 1e-12 * 100.0);
    EXPECT_LE(testing::max_abs_diff(again.d, b.d), 1e-12 * 100.0);
  }
}

TEST(HaarDwt2, OddSizesReplicateLastRowAndColumn) {
  std::mt19937_64 gen(22);
  const GrayImage x = testing::random_image(gen, 5, 7);
  GrayImage padded(6, 8);
  for (std::size_t r = 0; r < 6; ++r)
    for (std::size_t c = 0; c < 8; ++c) padded(r, c) = x.at_clamped(r, c);
  const HaarBands a = haar_dwt2(x), b = haar_dwt2(padded);
  EXPECT_EQ(a.a.rows(), 3u);
  EXPECT_EQ(a.a.cols(), 4u);
  EXPECT_EQ(a.a, b.a);
  EXPECT_EQ(a.h, b.h);
  EXPECT_EQ(a.v, b.v);
  EXPECT_EQ(a.d, b.d);
}

TEST(HaarDwt2, TooSmall) {
  try {
    haar_dwt2(GrayImage(1, 4));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionTooSmall);
  }
}

TEST(Decompose3, Dimensions) {
  const SubbandSet s = decompose3(GrayImage(96, 96, 3.0));
  for (const GrayImage* g : {&s.a1, &s.h1, &s.v1, &s.d1}) EXPECT_EQ(g->rows(), 48u);
  for (const GrayImage* g : {&s.a2, &s.h2, &s.v2, &s.d2}) EXPECT_EQ(g->cols(), 24u);
  for (const GrayImage* g : {&s.a3, &s.h3, &s.v3, &s.d3}) EXPECT_EQ(g->rows(), 12u);
}

TEST(Decompose3, ConstantPropagation) {
  const SubbandSet s = decompose3(GrayImage(8, 8, 5.0));
  EXPECT_EQ(s.a3, GrayImage(1, 1, 40.0));
  for (auto name : {"h1", "v1", "d1", "h2", "v2", "d2", "h3", "v3", "d3"})
    for (double v : s.band(name).pixels()) EXPECT_EQ(v, 0.0) << name;
}

TEST(Decompose3, EnergyConservation) {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 50; ++trial) {
    const GrayImage x = testing::random_image(gen, 16, 16);
    double sum = 0.0;
    for (auto name : SubbandSet::kPatternBands) {
      const SubbandSet s = decompose3(x);
      sum += testing::energy(s.band(name));
    }
    EXPECT_NEAR(sum, testing::energy(x), 1e-9 * testing::energy(x));
  }
}

TEST(Decompose3, Linearity) {
  std::mt19937_64 gen(24);
  const GrayImage x = testing::random_image(gen, 32, 24), y = testing::random_image(gen, 32, 24);
  const double alpha = 0.7, beta = -1.3;
  GrayImage mix(32, 24);
  for (std::size_t i = 0; i < mix.size(); ++i) mix.pixels()[i] = alpha * x.pixels()[i] + beta * y.pixels()[i];
  const SubbandSet sx = decompose3(x), sy = decompose3(y), sm = decompose3(mix);
  for (auto name : {"a1", "h1", "a2", "v2", "a3", "d3"}) {
    const GrayImage& m = sm.band(name);
    for (std::size_t i = 0; i < m.size(); ++i)
      EXPECT_NEAR(m.pixels()[i], alpha * sx.band(name).pixels()[i] + beta * sy.band(name).pixels()[i], 1e-9);
  }
}

TEST(Decompose3, ThreeLevelReconstruction) {
  std::mt19937_64 gen(25);
  const GrayImage x = testing::random_image(gen, 64, 40);
  const SubbandSet s = decompose3(x);
  const GrayImage a2 = haar_idwt2({s.a3, s.h3, s.v3, s.d3});
  const GrayImage a1 = haar_idwt2({a2, s.h2, s.v2, s.d2});
  const GrayImage back = haar_idwt2({a1, s.h1, s.v1, s.d1});
  EXPECT_LE(testing::max_abs_diff(back, x), 1e-12 * 255.0 * 8);
}

TEST(Decompose3, TooSmallAndUnknownBand) {
  EXPECT_THROW(decompose3(GrayImage(7, 16)), Error);
  const SubbandSet s = decompose3(GrayImage(8, 8));
  EXPECT_THROW(s.band("q9"), Error);
}

TEST(HaarDwt2, ParallelMatchesSerialBitForBit) {
  std::mt19937_64 gen(26);
  const GrayImage x = testing::random_image(gen, 97, 96);
  const HaarBands a = haar_dwt2(x), b = serial::haar_dwt2(x);
  EXPECT_EQ(a.a, b.a);
  EXPECT_EQ(a.h, b.h);
  EXPECT_EQ(a.v, b.v);
  EXPECT_EQ(a.d, b.d);
}

}  // namespace
}  // namespace atp
