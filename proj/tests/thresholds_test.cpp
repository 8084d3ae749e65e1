#include <cmath>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "atp/diffusion.hpp"
#include "atp/error.hpp"
#include "atp/thresholds.hpp"
#include "atp/wavelet.hpp"
#include "test_util.hpp"

#ifndef ATP_DATA_DIR
#error "ATP_DATA_DIR must point at the bundled data directory"
#endif

namespace atp {
namespace {

// 2.2 * exp(-2k), evaluated independently of the library.
const std::vector<double> kHandSchedule{2.2, 0.29773762312054797, 0.0402944055552152, 0.0054532547886659895,
                                        0.0007380177813855262};

void expect_non_increasing(const ThresholdTable& t) {
  for (const auto& [name, values] : t.subbands)
    for (std::size_t k = 1; k < values.size(); ++k) EXPECT_LE(values[k], values[k - 1]) << name << " k=" << k;
}

TEST(PixelSchedule, HandCase) {
  const auto s = pixel_schedule(2.0, 1.0, 2.2, 5);
  ASSERT_EQ(s.size(), 5u);
  for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(s[k], kHandSchedule[k], 1e-12 * kHandSchedule[k]);
  // Short forms agree to half a unit in their last printed digit.
  EXPECT_NEAR(s[1], 0.2977, 0.5e-4);
  EXPECT_NEAR(s[2], 0.04029, 0.5e-5);
}

TEST(PixelSchedule, NegativeAlphaIsClamped) {
  const auto s = pixel_schedule(-1.0, -3.0, 2.0, 4);
  for (double v : s) EXPECT_DOUBLE_EQ(v, 4.0);
}

TEST(BandThresholds, SinglePixelHandCase) {
  // Only pixels whose 3x3 window includes the centre see H=2, L=1; every
  // other window is flat at 1 and is skipped.
  GrayImage band(5, 5, 1.0);
  band(2, 2) = 2.0;
  for (auto reduction : {ThresholdReduction::PerLevelMax, ThresholdReduction::PeakPixel}) {
    const auto t = band_thresholds(band, 2.2, 5, reduction);
    for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(t[k], kHandSchedule[k], 1e-12);
  }
}

TEST(BandThresholds, KOneIsBetaTimesMaxRange) {
  std::mt19937_64 gen(41);
  const GrayImage band = testing::random_image(gen, 9, 9);
  double best = 0.0;
  for (std::ptrdiff_t r = 0; r < 9; ++r)
    for (std::ptrdiff_t c = 0; c < 9; ++c) {
      double hi = -1e300, lo = 1e300;
      for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
          hi = std::max(hi, band.at_clamped(r + dr, c + dc));
          lo = std::min(lo, band.at_clamped(r + dr, c + dc));
        }
      best = std::max(best, hi - lo);
    }
  for (auto reduction : {ThresholdReduction::PerLevelMax, ThresholdReduction::PeakPixel}) {
    const auto t = band_thresholds(band, 1.7, 1, reduction);
    ASSERT_EQ(t.size(), 1u);
    EXPECT_DOUBLE_EQ(t[0], 1.7 * best);
  }
}

TEST(BandThresholds, ConstantBandIsDegenerate) {
  try {
    band_thresholds(GrayImage(6, 6, 3.0), 2.2, 5);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateReference);
  }
}

TEST(DeriveThresholds, NonIncreasingForBothReductions) {
  std::mt19937_64 gen(42);
  const DiffusionParams ad{40.0, 5, 0.25};
  for (int trial = 0; trial < 10; ++trial) {
    const GrayImage ref = testing::random_image(gen, 32, 32);
    for (auto reduction : {ThresholdReduction::PerLevelMax, ThresholdReduction::PeakPixel}) {
      const ThresholdTable t = derive_thresholds(ref, 2.2, 5, ad, reduction);
      EXPECT_NO_THROW(t.validate());
      EXPECT_EQ(t.subbands.size(), 10u);
      expect_non_increasing(t);
    }
  }
}

TEST(DeriveThresholds, ConstantReferenceIsDegenerate) {
  try {
    derive_thresholds(GrayImage(32, 32, 100.0), 2.2, 5, DiffusionParams{});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateReference);
  }
}

TEST(ThresholdTable, BundledTableShape) {
  const ThresholdTable t = bundled_thresholds();
  EXPECT_EQ(t.K, 5u);
  EXPECT_DOUBLE_EQ(t.beta, 2.2);
  EXPECT_NO_THROW(t.validate());
  for (auto name : SubbandSet::kPatternBands) EXPECT_EQ(t.at(std::string(name)).size(), 5u);
}

TEST(ThresholdTable, BundledFileMatchesToFourDecimals) {
  const ThresholdTable file = load_threshold_table(std::filesystem::path(ATP_DATA_DIR) / "bundled_thresholds.json");
  const ThresholdTable builtin = bundled_thresholds();
  ASSERT_EQ(file.subbands.size(), builtin.subbands.size());
  for (const auto& [name, values] : builtin.subbands)
    for (std::size_t k = 0; k < values.size(); ++k) EXPECT_NEAR(file.at(name)[k], values[k], 5e-5) << name;

  testing::TempDir dir;
  save_threshold_table(file, dir / "t.json");
  const ThresholdTable again = load_threshold_table(dir / "t.json");
  for (const auto& [name, values] : file.subbands)
    for (std::size_t k = 0; k < values.size(); ++k)
      EXPECT_EQ(std::round(again.at(name)[k] * 1e4), std::round(values[k] * 1e4)) << name;
  EXPECT_EQ(again, file);
}

TEST(ThresholdTable, ValidationFailures) {
  ThresholdTable t = bundled_thresholds();
  t.subbands["h1"][3] = t.subbands["h1"][2] + 1.0;
  EXPECT_THROW(t.validate(), Error);

  t = bundled_thresholds();
  t.subbands["v2"].pop_back();
  EXPECT_THROW(t.validate(), Error);

  t = bundled_thresholds();
  t.subbands.erase("a3");
  EXPECT_THROW(t.validate(), Error);
  try {
    t.at("a3");
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::LayoutMismatch);
  }

  nlohmann::json j = bundled_thresholds().to_json();
  j["subbands"]["d3"][0] = -1.0;
  EXPECT_THROW(ThresholdTable::from_json(j), Error);
}

}  // namespace
}  // namespace atp
