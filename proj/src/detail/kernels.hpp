#pragma once

// Per-pixel arithmetic shared by the OpenMP kernels and their serial
// references.

#include <cmath>
#include <cstddef>
#include <span>

#include "atp/image.hpp"

namespace atp::detail {

inline double conduction_flux(double gradient, double inv_sigma) {
  const double s = gradient * inv_sigma;
  return std::exp(-s * s) * gradient;
}

// Vertical and horizontal pairs are summed separately and then combined so
// that transposes and flips reproduce the update exactly.
inline double diffused_pixel(const GrayImage& img, std::size_t r, std::size_t c, double inv_sigma,
                             double step) {
  const auto ri = static_cast<std::ptrdiff_t>(r);
  const auto ci = static_cast<std::ptrdiff_t>(c);
  const double centre = img(r, c);
  const double gn = img.at_clamped(ri - 1, ci) - centre;
  const double gs = img.at_clamped(ri + 1, ci) - centre;
  const double ge = img.at_clamped(ri, ci + 1) - centre;
  const double gw = img.at_clamped(ri, ci - 1) - centre;
  const double vertical = conduction_flux(gn, inv_sigma) + conduction_flux(gs, inv_sigma);
  const double horizontal = conduction_flux(ge, inv_sigma) + conduction_flux(gw, inv_sigma);
  return centre + step * (vertical + horizontal);
}

// Even-padded fetch for the Haar blocks: the last row/column is replicated.
inline double padded(const GrayImage& img, std::size_t r, std::size_t c) {
  return img(r < img.rows() ? r : img.rows() - 1, c < img.cols() ? c : img.cols() - 1);
}

struct HaarBlock {
  double a, h, v, d;
};

inline HaarBlock haar_block(double p00, double p01, double p10, double p11) {
  return {(p00 + p01 + p10 + p11) * 0.5, (p00 + p01 - p10 - p11) * 0.5,
          (p00 - p01 + p10 - p11) * 0.5, (p00 - p01 - p10 + p11) * 0.5};
}

inline double pattern_pixel(const GrayImage& img, std::size_t r, std::size_t c,
                            std::span<const double> thresholds) {
  const auto ri = static_cast<std::ptrdiff_t>(r);
  const auto ci = static_cast<std::ptrdiff_t>(c);
  double neighbours[8];
  int n = 0;
  for (std::ptrdiff_t dr = -1; dr <= 1; ++dr) {
    for (std::ptrdiff_t dc = -1; dc <= 1; ++dc) {
      if (dr == 0 && dc == 0) continue;
      neighbours[n++] = img.at_clamped(ri + dr, ci + dc);
    }
  }
  unsigned sum = 0;
  for (double t : thresholds) {
    unsigned code = 0;
    for (int i = 0; i < 8; ++i) {
      if (neighbours[i] > t) code += 2u << i;  // weight 2^(i+1)
    }
    sum += code;
  }
  return static_cast<double>(sum);
}

}  // namespace atp::detail
