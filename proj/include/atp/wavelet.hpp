#pragma once

#include <array>
#include <string_view>

#include "atp/image.hpp"

namespace atp {

struct HaarBands {
  GrayImage a, h, v, d;
};

/// Orthonormal 2-D Haar on non-overlapping 2x2 blocks [p00 p01; p10 p11]:
///   a = (p00+p01+p10+p11)/2   h = (p00+p01-p10-p11)/2
///   v = (p00-p01+p10-p11)/2   d = (p00-p01-p10+p11)/2
/// Odd sizes are padded by replicating the last row/column.
HaarBands haar_dwt2(const GrayImage& img);

/// Inverse of haar_dwt2 for even-sized sources.
GrayImage haar_idwt2(const HaarBands& bands);

/// Three-level pyramid: each level transforms the previous approximation.
struct SubbandSet {
  GrayImage a1, h1, v1, d1;
  GrayImage a2, h2, v2, d2;
  GrayImage a3, h3, v3, d3;

  // The ten layers that pass through the pattern transform, in feature order.
  static constexpr std::array<std::string_view, 10> kPatternBands = {
      "h1", "v1", "d1", "h2", "v2", "d2", "a3", "h3", "v3", "d3"};

  const GrayImage& band(std::string_view name) const;  // throws InvalidParams
};

SubbandSet decompose3(const GrayImage& img);

}  // namespace atp
