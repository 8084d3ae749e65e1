#include "atp/wavelet.hpp"

#include <string>

#include "atp/error.hpp"
#include "detail/kernels.hpp"

namespace atp {

HaarBands haar_dwt2(const GrayImage& img) {
  if (img.rows() < 2 || img.cols() < 2) {
    throw Error(ErrorKind::DimensionTooSmall, "Haar transform needs at least 2x2, got " +
                                                  std::to_string(img.rows()) + "x" + std::to_string(img.cols()));
  }
  const std::size_t rows = (img.rows() + 1) / 2;
  const std::size_t cols = (img.cols() + 1) / 2;
  HaarBands out{GrayImage(rows, cols), GrayImage(rows, cols), GrayImage(rows, cols), GrayImage(rows, cols)};
  const auto n = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ri = 0; ri < n; ++ri) {
    const auto r = static_cast<std::size_t>(ri);
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

GrayImage haar_idwt2(const HaarBands& bands) {
  const std::size_t rows = bands.a.rows();
  const std::size_t cols = bands.a.cols();
  for (const GrayImage* band : {&bands.h, &bands.v, &bands.d}) {
    if (band->rows() != rows || band->cols() != cols) {
      throw Error(ErrorKind::DimensionMismatch, "Haar subbands must share dimensions");
    }
  }
  if (rows == 0) throw Error(ErrorKind::DimensionMismatch, "empty subbands");
  // The 2x2 Haar matrix is symmetric and orthonormal, so it is its own
  // inverse; its outputs come back in p00, p01, p10, p11 order.
  GrayImage out(2 * rows, 2 * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const auto p = detail::haar_block(bands.a(r, c), bands.h(r, c), bands.v(r, c), bands.d(r, c));
      out(2 * r, 2 * c) = p.a;
      out(2 * r, 2 * c + 1) = p.h;
      out(2 * r + 1, 2 * c) = p.v;
      out(2 * r + 1, 2 * c + 1) = p.d;
    }
  }
  return out;
}

const GrayImage& SubbandSet::band(std::string_view name) const {
  if (name == "a1") return a1;
  if (name == "h1") return h1;
  if (name == "v1") return v1;
  if (name == "d1") return d1;
  if (name == "a2") return a2;
  if (name == "h2") return h2;
  if (name == "v2") return v2;
  if (name == "d2") return d2;
  if (name == "a3") return a3;
  if (name == "h3") return h3;
  if (name == "v3") return v3;
  if (name == "d3") return d3;
  throw Error(ErrorKind::InvalidParams, "unknown subband " + std::string(name));
}

SubbandSet decompose3(const GrayImage& img) {
  if (img.rows() < 8 || img.cols() < 8) {
    throw Error(ErrorKind::DimensionTooSmall, "three-level decomposition needs at least 8x8, got " +
                                                  std::to_string(img.rows()) + "x" + std::to_string(img.cols()));
  }
  auto l1 = haar_dwt2(img);
  auto l2 = haar_dwt2(l1.a);
  auto l3 = haar_dwt2(l2.a);
  return SubbandSet{std::move(l1.a), std::move(l1.h), std::move(l1.v), std::move(l1.d),
                    std::move(l2.a), std::move(l2.h), std::move(l2.v), std::move(l2.d),
                    std::move(l3.a), std::move(l3.h), std::move(l3.v), std::move(l3.d)};
}

}  // namespace atp
