#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "atp/distortions.hpp"
#include "atp/error.hpp"
#include "atp/random.hpp"
#include "test_util.hpp"

namespace atp {
namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::IoError;
}

GrayImage positive_image(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  return testing::random_image(gen, 96, 96, 1.0, 255.0);
}

double measured_snr_db(const GrayImage& in, const GrayImage& out) {
  double ps = 0.0, pn = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    ps += in.pixels()[i] * in.pixels()[i];
    const double e = out.pixels()[i] - in.pixels()[i];
    pn += e * e;
  }
  return 10.0 * std::log10(ps / pn);
}

TEST(Rng, DeterministicAndInRange) {
  Rng a(5), b(5), c(6);
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    EXPECT_EQ(u, b.uniform());
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
  EXPECT_NE(Rng(5).next_u64(), c.next_u64());
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
}

TEST(Rng, NormalMoments) {
  Rng r(9);
  double s = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(PixelMissing, Extremes) {
  const GrayImage img = positive_image(1);
  EXPECT_EQ(pixel_missing(img, 0.0, 3), img);
  const GrayImage out = pixel_missing(img, 1.0, 3);
  for (double v : out.pixels()) EXPECT_EQ(v, 0.0);
}

TEST(PixelMissing, RateConcentrationAndSurvivors) {
  const GrayImage img = positive_image(2);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const GrayImage out = pixel_missing(img, 0.9, seed);
    std::size_t zeros = 0;
    for (std::size_t i = 0; i < img.size(); ++i) {
      if (out.pixels()[i] == 0.0) ++zeros;
      else EXPECT_EQ(out.pixels()[i], img.pixels()[i]);
    }
    const double frac = double(zeros) / double(img.size());
    EXPECT_GE(frac, 0.88) << seed;
    EXPECT_LE(frac, 0.92) << seed;
  }
  EXPECT_EQ(pixel_missing(img, 0.5, 7), pixel_missing(img, 0.5, 7));
  EXPECT_NE(pixel_missing(img, 0.5, 7), pixel_missing(img, 0.5, 8));
}

TEST(PixelMissing, InvalidRate) {
  EXPECT_EQ(kind_of([] { pixel_missing(GrayImage(4, 4), 1.5, 0); }), ErrorKind::InvalidRate);
  EXPECT_EQ(kind_of([] { pixel_missing(GrayImage(4, 4), -0.1, 0); }), ErrorKind::InvalidRate);
}

TEST(BlockMissing, CenteredSeventyOnNinetySix) {
  const GrayImage img = positive_image(3);
  const GrayImage out = block_missing(img, 70, 70);
  std::size_t zeros = 0, kept = 0;
  for (std::size_t r = 0; r < 96; ++r)
    for (std::size_t c = 0; c < 96; ++c) {
      const bool inside = r >= 13 && r <= 82 && c >= 13 && c <= 82;
      if (inside) {
        EXPECT_EQ(out(r, c), 0.0);
        ++zeros;
      } else {
        EXPECT_EQ(out(r, c), img(r, c));
        ++kept;
      }
    }
  EXPECT_EQ(zeros, 4900u);
  EXPECT_EQ(kept, 4316u);
}

TEST(BlockMissing, FullAndMinimal) {
  const GrayImage img = positive_image(4);
  const GrayImage out = block_missing(img, 96, 96);
  for (double v : out.pixels()) EXPECT_EQ(v, 0.0);
  const GrayImage one = block_missing(img, 1, 1, BlockAnchor{0, 0});
  EXPECT_EQ(one(0, 0), 0.0);
  GrayImage expect = img;
  expect(0, 0) = 0.0;
  EXPECT_EQ(one, expect);
  EXPECT_EQ(kind_of([&] { block_missing(img, 97, 10); }), ErrorKind::BlockTooLarge);
  EXPECT_EQ(kind_of([&] { block_missing(img, 10, 10, BlockAnchor{90, 0}); }), ErrorKind::BlockTooLarge);
}

TEST(Awgn, VanishingNoise) {
  const GrayImage img = positive_image(5);
  const GrayImage out = awgn(img, 300.0, 1);
  EXPECT_LT(testing::max_abs_diff(img, out), 1e-3);
}

TEST(Awgn, ZeroDecibelNoisePower) {
  const GrayImage img(96, 96, 100.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const GrayImage out = awgn(img, 0.0, seed);
    double pn = 0.0;
    for (std::size_t i = 0; i < img.size(); ++i) pn += (out.pixels()[i] - 100.0) * (out.pixels()[i] - 100.0);
    pn /= double(img.size());
    EXPECT_NEAR(pn, 1e4, 0.05 * 1e4) << seed;
  }
}

TEST(Awgn, MinusThirtyDecibels) {
  const GrayImage img = positive_image(6);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const GrayImage out = awgn(img, -30.0, seed);
    EXPECT_NEAR(measured_snr_db(img, out), -30.0, 0.5) << seed;
  }
}

TEST(Awgn, NoClippingAndDeterminism) {
  const GrayImage img = positive_image(7);
  const GrayImage out = awgn(img, -10.0, 3);
  EXPECT_LT(out.min(), 0.0);
  EXPECT_GT(out.max(), 255.0);
  EXPECT_EQ(out, awgn(img, -10.0, 3));
  EXPECT_EQ(kind_of([] { awgn(GrayImage(8, 8, 0.0), 10.0, 1); }), ErrorKind::ZeroSignalPower);
}

TEST(DistortionSpec, JsonAndDispatch) {
  const GrayImage img = positive_image(8);
  DistortionSpec s;
  s.kind = DistortionKind::BlockMissing;
  s.block_height = 50;
  s.block_width = 60;
  s.anchor = BlockAnchor{3, 4};
  const DistortionSpec back = DistortionSpec::from_json(s.to_json());
  EXPECT_EQ(back.kind, DistortionKind::BlockMissing);
  EXPECT_EQ(back.param_label(), "50x60");
  EXPECT_EQ(apply_distortion(img, back), block_missing(img, 50, 60, BlockAnchor{3, 4}));
  EXPECT_FALSE(back.seeded());

  DistortionSpec p;
  p.kind = DistortionKind::PixelMissing;
  p.rate = 0.4;
  p.seed = 99;
  EXPECT_EQ(p.param_label(), "0.4");
  EXPECT_EQ(apply_distortion(img, DistortionSpec::from_json(p.to_json())), pixel_missing(img, 0.4, 99));

  DistortionSpec a;
  a.kind = DistortionKind::Awgn;
  a.snr_db = -20;
  a.seed = 5;
  EXPECT_EQ(a.param_label(), "-20");
  EXPECT_EQ(apply_distortion(img, a), awgn(img, -20, 5));

  EXPECT_EQ(distortion_kind_from_string("awgn"), DistortionKind::Awgn);
  EXPECT_EQ(to_string(DistortionKind::PixelMissing), "pixel_missing");
  EXPECT_EQ(kind_of([] { distortion_kind_from_string("jpeg"); }), ErrorKind::InvalidSpec);
}

}  // namespace
}  // namespace atp
