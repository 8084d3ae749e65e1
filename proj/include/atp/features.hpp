#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "atp/diffusion.hpp"
#include "atp/image.hpp"
#include "atp/thresholds.hpp"

namespace atp {

struct Segment {
  std::string name;
  std::size_t offset = 0;
  std::size_t length = 0;
  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Concatenation of AD, a1, a2 and the ten pattern images P1..P10, each
/// flattened row-major.
struct FeatureVector {
  std::vector<double> values;
  std::vector<Segment> layout;

  std::size_t size() const noexcept { return values.size(); }
  std::span<const double> segment(std::string_view name) const;  // throws LayoutMismatch
};

/// Everything that determines the feature layout and values for an image.
struct FeatureConfig {
  std::size_t working_size = 96;
  DiffusionParams diffusion;
  ThresholdTable thresholds;

  void validate() const;
  // FNV-1a over the canonical JSON of the config; models remember it so they
  // refuse features produced by a different pipeline.
  std::uint64_t hash() const;
  nlohmann::json to_json() const;
};

/// Segment names in concatenation order.
const std::vector<std::string>& segment_names();

/// Segment layout for a rows x cols diffused image.
std::vector<Segment> feature_layout(std::size_t rows, std::size_t cols);

/// `img` must already be at the working size (LayoutMismatch otherwise).
FeatureVector extract_features(const GrayImage& img, const ThresholdTable& table,
                               const DiffusionParams& ad);
FeatureVector extract_features(const GrayImage& img, const FeatureConfig& config);

/// Extracts every image, parallel across images. Output order matches input.
std::vector<FeatureVector> extract_batch(std::span<const GrayImage> images,
                                         const FeatureConfig& config);

// Feature matrix export: one row per image with the label first.
void write_feature_csv(const std::filesystem::path& path, std::span<const FeatureVector> rows,
                       std::span<const int> labels);

// Binary records: "ATPFEAT1", u64 rows, u64 cols, then rows * (1 + cols)
// little-endian doubles (label, features...).
struct FeatureMatrix {
  std::vector<int> labels;
  std::vector<std::vector<double>> rows;
};
void write_feature_binary(const std::filesystem::path& path, std::span<const FeatureVector> rows,
                          std::span<const int> labels);
FeatureMatrix read_feature_binary(const std::filesystem::path& path);

}  // namespace atp
