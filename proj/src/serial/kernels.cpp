#include <string>

#include "atp/error.hpp"
#include "atp/serial.hpp"
#include "detail/kernels.hpp"

namespace atp::serial {

GrayImage diffuse_step(const GrayImage& img, const DiffusionParams& params) {
  params.validate();
  const double inv_sigma = 1.0 / params.sigma;
  GrayImage out(img.rows(), img.cols());
  for (std::size_t r = 0; r < img.rows(); ++r)
    for (std::size_t c = 0; c < img.cols(); ++c)
      out(r, c) = detail::diffused_pixel(img, r, c, inv_sigma, params.step);
  return out;
}

GrayImage diffuse(const GrayImage& img, const DiffusionParams& params) {
  GrayImage current = img;
  for (std::size_t t = 0; t < params.iterations; ++t) current = serial::diffuse_step(current, params);
  return current;
}

HaarBands haar_dwt2(const GrayImage& img) {
  if (img.rows() < 2 || img.cols() < 2) {
    throw Error(ErrorKind::DimensionTooSmall, "Haar transform needs at least 2x2");
  }
  const std::size_t rows = (img.rows() + 1) / 2;
  const std::size_t cols = (img.cols() + 1) / 2;
  HaarBands out{GrayImage(rows, cols), GrayImage(rows, cols), GrayImage(rows, cols), GrayImage(rows, cols)};
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const auto b = detail::haar_block(detail::padded(img, 2 * r, 2 * c), detail::padded(img, 2 * r, 2 * c + 1),
                                        detail::padded(img, 2 * r + 1, 2 * c),
                                        detail::padded(img, 2 * r + 1, 2 * c + 1));
      out.a(r, c) = b.a;
      out.h(r, c) = b.h;
      out.v(r, c) = b.v;
      out.d(r, c) = b.d;
    }
  }
  return out;
}

GrayImage atp_transform(const GrayImage& subband, std::span<const double> thresholds) {
  if (thresholds.empty()) throw Error(ErrorKind::EmptyThresholds, "pattern transform needs K >= 1");
  if (subband.rows() < 3 || subband.cols() < 3) {
    throw Error(ErrorKind::DimensionTooSmall, "pattern transform needs at least 3x3");
  }
  GrayImage out(subband.rows(), subband.cols());
  for (std::size_t r = 0; r < subband.rows(); ++r)
    for (std::size_t c = 0; c < subband.cols(); ++c)
      out(r, c) = detail::pattern_pixel(subband, r, c, thresholds);
  return out;
}

}  // namespace atp::serial
