#pragma once

#include <cstdint>
#include <span>

#include "atp/image.hpp"

namespace atp {

/// Per-pixel sum over thresholds of the 8-neighbour exceed code.
///
/// For each threshold T, the eight neighbours of the replicate-padded 3x3
/// window are visited in row-major order (centre skipped); neighbour i
/// (1-based) contributes 2^i when its value is strictly greater than T. The
/// per-threshold codes lie in [0, 510] and are summed, so the output lies in
/// [0, 510 * thresholds.size()]. Stored as doubles so the result drops straight
/// into a feature vector.
GrayImage atp_transform(const GrayImage& subband, std::span<const double> thresholds);

inline constexpr std::uint32_t kMaxCodePerThreshold = 510;

}  // namespace atp
