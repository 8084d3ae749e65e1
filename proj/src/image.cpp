#include "atp/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "atp/error.hpp"

namespace atp {

namespace {

void check_dims(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) {
    throw Error(ErrorKind::InvalidDimensions,
                "image dimensions must be positive, got " + std::to_string(rows) + "x" +
                    std::to_string(cols));
  }
}

}  // namespace

GrayImage::GrayImage(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  check_dims(rows, cols);
  if (!std::isfinite(fill)) throw Error(ErrorKind::InvalidImage, "non-finite fill value");
}

GrayImage::GrayImage(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  check_dims(rows, cols);
  if (data_.size() != rows * cols) {
    throw Error(ErrorKind::InvalidDimensions, "pixel count " + std::to_string(data_.size()) +
                                                  " does not match " + std::to_string(rows) + "x" +
                                                  std::to_string(cols));
  }
  if (!std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); })) {
    throw Error(ErrorKind::InvalidImage, "image contains NaN or Inf");
  }
}

double GrayImage::at_clamped(std::ptrdiff_t r, std::ptrdiff_t c) const noexcept {
  const auto max_r = static_cast<std::ptrdiff_t>(rows_) - 1;
  const auto max_c = static_cast<std::ptrdiff_t>(cols_) - 1;
  r = std::clamp<std::ptrdiff_t>(r, 0, max_r);
  c = std::clamp<std::ptrdiff_t>(c, 0, max_c);
  return data_[static_cast<std::size_t>(r) * cols_ + static_cast<std::size_t>(c)];
}

double GrayImage::min() const { return *std::min_element(data_.begin(), data_.end()); }
double GrayImage::max() const { return *std::max_element(data_.begin(), data_.end()); }

GrayImage transpose(const GrayImage& img) {
  GrayImage out(img.cols(), img.rows());
  for (std::size_t r = 0; r < img.rows(); ++r)
    for (std::size_t c = 0; c < img.cols(); ++c) out(c, r) = img(r, c);
  return out;
}

GrayImage flip_horizontal(const GrayImage& img) {
  GrayImage out(img.rows(), img.cols());
  for (std::size_t r = 0; r < img.rows(); ++r)
    for (std::size_t c = 0; c < img.cols(); ++c) out(r, img.cols() - 1 - c) = img(r, c);
  return out;
}

GrayImage flip_vertical(const GrayImage& img) {
  GrayImage out(img.rows(), img.cols());
  for (std::size_t r = 0; r < img.rows(); ++r)
    for (std::size_t c = 0; c < img.cols(); ++c) out(img.rows() - 1 - r, c) = img(r, c);
  return out;
}

GrayImage resize_to(const GrayImage& img, std::size_t rows, std::size_t cols) {
  if (rows < 1 || cols < 1) {
    throw Error(ErrorKind::InvalidDimensions,
                "resize target must be non-empty, got " + std::to_string(rows) + "x" +
                    std::to_string(cols));
  }
  if (rows == img.rows() && cols == img.cols()) return img;

  const double sy = static_cast<double>(img.rows()) / static_cast<double>(rows);
  const double sx = static_cast<double>(img.cols()) / static_cast<double>(cols);
  const double max_y = static_cast<double>(img.rows() - 1);
  const double max_x = static_cast<double>(img.cols() - 1);

  GrayImage out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const double y = std::clamp((static_cast<double>(r) + 0.5) * sy - 0.5, 0.0, max_y);
    const auto y0 = static_cast<std::size_t>(y);
    const std::size_t y1 = std::min(y0 + 1, img.rows() - 1);
    const double fy = y - static_cast<double>(y0);
    for (std::size_t c = 0; c < cols; ++c) {
      const double x = std::clamp((static_cast<double>(c) + 0.5) * sx - 0.5, 0.0, max_x);
      const auto x0 = static_cast<std::size_t>(x);
      const std::size_t x1 = std::min(x0 + 1, img.cols() - 1);
      const double fx = x - static_cast<double>(x0);
      const double top = img(y0, x0) + fx * (img(y0, x1) - img(y0, x0));
      const double bottom = img(y1, x0) + fx * (img(y1, x1) - img(y1, x0));
      const double lo = std::min({img(y0, x0), img(y0, x1), img(y1, x0), img(y1, x1)});
      const double hi = std::max({img(y0, x0), img(y0, x1), img(y1, x0), img(y1, x1)});
      out(r, c) = std::clamp(top + fy * (bottom - top), lo, hi);
    }
  }
  return out;
}

}  // namespace atp
