#pragma once

#include <cstddef>

#include "atp/image.hpp"

namespace atp {

// Perona-Malik parameters for the exponential conduction function.
struct DiffusionParams {
  double sigma = 40.0;         // conduction scale
  std::size_t iterations = 15;
  double step = 0.25;          // explicit update scale, stable for <= 0.25

  void validate() const;  // throws Error(InvalidParams)
  friend bool operator==(const DiffusionParams&, const DiffusionParams&) = default;
};

/// One explicit Jacobi-style update. Each pixel moves by
/// step * sum over N,S,E,W of exp(-(g/sigma)^2) * g, where g is the
/// neighbour difference; borders replicate so cross-border gradients vanish.
/// Rows are partitioned across OpenMP threads; the result is bit-identical
/// to serial::diffuse_step.
GrayImage diffuse_step(const GrayImage& img, const DiffusionParams& params);

/// Applies diffuse_step `params.iterations` times.
GrayImage diffuse(const GrayImage& img, const DiffusionParams& params);

}  // namespace atp
