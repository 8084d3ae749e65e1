#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"

#include "atp/image.hpp"

namespace atp {

enum class DistortionKind { PixelMissing, BlockMissing, Awgn };

std::string to_string(DistortionKind kind);
DistortionKind distortion_kind_from_string(const std::string& s);  // throws InvalidSpec

struct BlockAnchor {
  // nullopt row/col means centered placement.
  std::optional<std::size_t> row;
  std::optional<std::size_t> col;
  bool centered() const noexcept { return !row.has_value(); }
};

struct DistortionSpec {
  DistortionKind kind = DistortionKind::PixelMissing;
  double rate = 0.0;             // PixelMissing
  std::size_t block_height = 0;  // BlockMissing
  std::size_t block_width = 0;
  BlockAnchor anchor;
  double snr_db = 0.0;  // Awgn
  std::uint64_t seed = 0;

  bool seeded() const noexcept { return kind != DistortionKind::BlockMissing; }
  // The swept parameter rendered for reports: rate, "HxW" or dB.
  std::string param_label() const;

  nlohmann::json to_json() const;
  static DistortionSpec from_json(const nlohmann::json& j);
};

/// Multiplies by a Bernoulli keep-mask; each pixel is zeroed with
/// probability `rate`.
GrayImage pixel_missing(const GrayImage& img, double rate, std::uint64_t seed);

/// Zeroes a height x width rectangle. Centered placement uses
/// floor((dim - block) / 2).
GrayImage block_missing(const GrayImage& img, std::size_t height, std::size_t width,
                        const BlockAnchor& anchor = {});

/// Adds N(0, s^2) noise with s^2 = mean(x^2) / 10^(snr_db / 10). No clipping.
GrayImage awgn(const GrayImage& img, double snr_db, std::uint64_t seed);

GrayImage apply_distortion(const GrayImage& img, const DistortionSpec& spec);

}  // namespace atp
