#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace atp {

/// Dense row-major grid of real-valued intensities (nominally 0..255).
///
/// Pixels stay double precision from load onward; quantization only happens
/// when an image is written out. Any positive size is representable; the
/// stages that need a 3x3 neighbourhood check their own minimums.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(std::size_t rows, std::size_t cols, double fill = 0.0);
  GrayImage(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  // Replicate-edge access: out-of-range coordinates clamp to the border.
  double at_clamped(std::ptrdiff_t r, std::ptrdiff_t c) const noexcept;

  std::span<double> pixels() noexcept { return data_; }
  std::span<const double> pixels() const noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  double min() const;
  double max() const;

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

GrayImage transpose(const GrayImage& img);
GrayImage flip_horizontal(const GrayImage& img);
GrayImage flip_vertical(const GrayImage& img);

/// Bilinear resampling with pixel-centre alignment. Returns an exact copy
/// when the requested size equals the current one.
GrayImage resize_to(const GrayImage& img, std::size_t rows, std::size_t cols);

}  // namespace atp
