#pragma once

#include <cstring>
#include <string>

#include "atp/error.hpp"
#include "atp/features.hpp"
#include "atp/wavelet.hpp"

namespace atp::detail {

// Runs the feature pipeline with a pluggable kernel set so the OpenMP and
// serial paths assemble vectors identically.
template <class Kernels>
FeatureVector extract_with(const GrayImage& img, const ThresholdTable& table, const DiffusionParams& ad) {
  table.validate();
  if (img.rows() < 8 || img.cols() < 8) {
    throw Error(ErrorKind::DimensionTooSmall, "feature extraction needs at least 8x8 input");
  }
  const GrayImage diffused = Kernels::diffuse(img, ad);
  auto l1 = Kernels::dwt(diffused);
  auto l2 = Kernels::dwt(l1.a);
  auto l3 = Kernels::dwt(l2.a);

  FeatureVector fv;
  fv.layout = feature_layout(img.rows(), img.cols());
  fv.values.resize(fv.layout.back().offset + fv.layout.back().length);

  auto put = [&](std::size_t segment, const GrayImage& src) {
    const Segment& s = fv.layout[segment];
    if (src.size() != s.length) {
      throw Error(ErrorKind::LayoutMismatch, "segment " + s.name + " expected " + std::to_string(s.length) +
                                                 " values, got " + std::to_string(src.size()));
    }
    std::memcpy(fv.values.data() + s.offset, src.pixels().data(), s.length * sizeof(double));
  };
  auto pattern = [&](std::size_t segment, const char* band, const GrayImage& src) {
    put(segment, Kernels::pattern(src, table.at(band)));
  };

  put(0, diffused);
  put(1, l1.a);
  put(2, l2.a);
  pattern(3, "h1", l1.h);
  pattern(4, "v1", l1.v);
  pattern(5, "d1", l1.d);
  pattern(6, "h2", l2.h);
  pattern(7, "v2", l2.v);
  pattern(8, "d2", l2.d);
  pattern(9, "a3", l3.a);
  pattern(10, "h3", l3.h);
  pattern(11, "v3", l3.v);
  pattern(12, "d3", l3.d);
  return fv;
}

}  // namespace atp::detail
