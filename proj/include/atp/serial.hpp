#pragma once

// Single-threaded reference versions of the OpenMP kernels. They share the
// per-pixel arithmetic with the parallel code, so the parallel results must
// match them bit for bit; tests and the benchmark compare the two.

#include <span>
#include <vector>

#include "atp/diffusion.hpp"
#include "atp/features.hpp"
#include "atp/image.hpp"
#include "atp/wavelet.hpp"

namespace atp::serial {

GrayImage diffuse_step(const GrayImage& img, const DiffusionParams& params);
GrayImage diffuse(const GrayImage& img, const DiffusionParams& params);
HaarBands haar_dwt2(const GrayImage& img);
GrayImage atp_transform(const GrayImage& subband, std::span<const double> thresholds);
std::vector<FeatureVector> extract_batch(std::span<const GrayImage> images, const FeatureConfig& config);

}  // namespace atp::serial
