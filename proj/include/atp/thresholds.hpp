#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "atp/diffusion.hpp"
#include "atp/image.hpp"

namespace atp {

// How per-pixel schedules collapse to one threshold per (subband, k).
enum class ThresholdReduction {
  PerLevelMax,  // T^k = max over pixels of that pixel's T^k
  PeakPixel,    // the whole schedule of the pixel with the largest H - L
};

/// K thresholds for each of the ten pattern subbands.
struct ThresholdTable {
  double beta = 2.2;
  std::size_t K = 5;
  std::map<std::string, std::vector<double>> subbands;

  const std::vector<double>& at(const std::string& name) const;  // throws LayoutMismatch
  void validate() const;  // ten bands, K finite non-negative non-increasing values each

  nlohmann::json to_json() const;
  static ThresholdTable from_json(const nlohmann::json& j);

  friend bool operator==(const ThresholdTable&, const ThresholdTable&) = default;
};

ThresholdTable load_threshold_table(const std::filesystem::path& path);
void save_threshold_table(const ThresholdTable& table, const std::filesystem::path& path);

/// The hand-tuned thresholds for beta = 2.2 and K = 5 published with the
/// descriptor, shipped as a fixed baseline.
ThresholdTable bundled_thresholds();

/// Exponential schedule of one pixel whose 3x3 neighbourhood spans [low, high]:
///   T^k = beta * (high - low) * exp(-alpha * k),  alpha = high / (high - low).
/// A negative alpha (neighbourhood entirely below zero) is clamped to zero so
/// the schedule never grows. Requires high > low.
std::vector<double> pixel_schedule(double high, double low, double beta, std::size_t K);

/// Reduces the schedules of every pixel of `band` (3x3 replicate-padded
/// neighbourhoods, flat neighbourhoods skipped). Throws DegenerateReference
/// when the band is constant.
std::vector<double> band_thresholds(const GrayImage& band, double beta, std::size_t K,
                                    ThresholdReduction reduction = ThresholdReduction::PerLevelMax);

/// Diffuses and decomposes `reference`, then reduces each pattern band.
ThresholdTable derive_thresholds(const GrayImage& reference, double beta, std::size_t K,
                                 const DiffusionParams& ad,
                                 ThresholdReduction reduction = ThresholdReduction::PerLevelMax);

}  // namespace atp
