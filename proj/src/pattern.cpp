#include "atp/pattern.hpp"

#include <string>

#include "atp/error.hpp"
#include "detail/kernels.hpp"

namespace atp {

GrayImage atp_transform(const GrayImage& subband, std::span<const double> thresholds) {
  if (thresholds.empty()) throw Error(ErrorKind::EmptyThresholds, "pattern transform needs K >= 1");
  if (subband.rows() < 3 || subband.cols() < 3) {
    throw Error(ErrorKind::DimensionTooSmall, "pattern transform needs at least 3x3, got " +
                                                  std::to_string(subband.rows()) + "x" +
                                                  std::to_string(subband.cols()));
  }
  GrayImage out(subband.rows(), subband.cols());
  const auto rows = static_cast<std::ptrdiff_t>(subband.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < subband.cols(); ++c) {
      out(static_cast<std::size_t>(r), c) =
          detail::pattern_pixel(subband, static_cast<std::size_t>(r), c, thresholds);
    }
  }
  return out;
}

}  // namespace atp
