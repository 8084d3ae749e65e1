#include "atp/distortions.hpp"

#include <cmath>
#include <cstdio>

#include "atp/error.hpp"
#include "atp/random.hpp"

namespace atp {

std::string to_string(DistortionKind kind) {
  switch (kind) {
    case DistortionKind::PixelMissing: return "pixel_missing";
    case DistortionKind::BlockMissing: return "block_missing";
    case DistortionKind::Awgn: return "awgn";
  }
  return "unknown";
}

DistortionKind distortion_kind_from_string(const std::string& s) {
  if (s == "pixel_missing") return DistortionKind::PixelMissing;
  if (s == "block_missing") return DistortionKind::BlockMissing;
  if (s == "awgn") return DistortionKind::Awgn;
  throw Error(ErrorKind::InvalidSpec, "unknown distortion kind '" + s + "'");
}

std::string DistortionSpec::param_label() const {
  char buf[64];
  switch (kind) {
    case DistortionKind::PixelMissing: std::snprintf(buf, sizeof buf, "%g", rate); break;
    case DistortionKind::BlockMissing: std::snprintf(buf, sizeof buf, "%zux%zu", block_height, block_width); break;
    case DistortionKind::Awgn: std::snprintf(buf, sizeof buf, "%g", snr_db); break;
  }
  return buf;
}

nlohmann::json DistortionSpec::to_json() const {
  nlohmann::json j = {{"kind", to_string(kind)}, {"seed", seed}};
  switch (kind) {
    case DistortionKind::PixelMissing: j["rate"] = rate; break;
    case DistortionKind::BlockMissing:
      j["height"] = block_height;
      j["width"] = block_width;
      if (anchor.centered()) j["anchor"] = "centered";
      else j["anchor"] = {{"row", *anchor.row}, {"col", *anchor.col}};
      break;
    case DistortionKind::Awgn: j["snr_db"] = snr_db; break;
  }
  return j;
}

static BlockAnchor anchor_from_json(const nlohmann::json& j) {
  BlockAnchor a;
  if (j.is_string()) {
    if (j.get<std::string>() != "centered") throw Error(ErrorKind::InvalidSpec, "anchor must be 'centered' or {row, col}");
    return a;
  }
  a.row = j.at("row").get<std::size_t>();
  a.col = j.at("col").get<std::size_t>();
  return a;
}

DistortionSpec DistortionSpec::from_json(const nlohmann::json& j) {
  DistortionSpec s;
  try {
    s.kind = distortion_kind_from_string(j.at("kind").get<std::string>());
    s.seed = j.value("seed", std::uint64_t{0});
    switch (s.kind) {
      case DistortionKind::PixelMissing:
        s.rate = j.at("rate").get<double>();
        if (!(s.rate >= 0.0 && s.rate <= 1.0)) throw Error(ErrorKind::InvalidSpec, "rate must lie in [0, 1]");
        break;
      case DistortionKind::BlockMissing:
        s.block_height = j.at("height").get<std::size_t>();
        s.block_width = j.at("width").get<std::size_t>();
        if (j.contains("anchor")) s.anchor = anchor_from_json(j.at("anchor"));
        break;
      case DistortionKind::Awgn:
        s.snr_db = j.at("snr_db").get<double>();
        if (!std::isfinite(s.snr_db)) throw Error(ErrorKind::InvalidSpec, "snr_db must be finite");
        break;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidSpec, e.what());
  }
  return s;
}

GrayImage pixel_missing(const GrayImage& img, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw Error(ErrorKind::InvalidRate, "missing rate must lie in [0, 1], got " + std::to_string(rate));
  }
  Rng rng(seed);
  GrayImage out = img;
  for (double& v : out.pixels()) {
    if (rng.uniform() < rate) v = 0.0;
  }
  return out;
}

GrayImage block_missing(const GrayImage& img, std::size_t height, std::size_t width, const BlockAnchor& anchor) {
  if (height == 0 || width == 0) throw Error(ErrorKind::InvalidSpec, "block must be non-empty");
  if (height > img.rows() || width > img.cols()) {
    throw Error(ErrorKind::BlockTooLarge, std::to_string(height) + "x" + std::to_string(width) +
                                              " block does not fit a " + std::to_string(img.rows()) + "x" +
                                              std::to_string(img.cols()) + " image");
  }
  const std::size_t top = anchor.centered() ? (img.rows() - height) / 2 : *anchor.row;
  const std::size_t left = anchor.centered() ? (img.cols() - width) / 2 : *anchor.col;
  if (top + height > img.rows() || left + width > img.cols()) {
    throw Error(ErrorKind::BlockTooLarge, "block anchored at (" + std::to_string(top) + ", " + std::to_string(left) +
                                              ") extends past the image");
  }
  GrayImage out = img;
  for (std::size_t r = top; r < top + height; ++r)
    for (std::size_t c = left; c < left + width; ++c) out(r, c) = 0.0;
  return out;
}

GrayImage awgn(const GrayImage& img, double snr_db, std::uint64_t seed) {
  if (!std::isfinite(snr_db)) throw Error(ErrorKind::InvalidSpec, "snr_db must be finite");
  double power = 0.0;
  for (double v : img.pixels()) power += v * v;
  power /= static_cast<double>(img.size());
  if (!(power > 0.0)) throw Error(ErrorKind::ZeroSignalPower, "cannot set an SNR for an all-zero image");
  const double sigma = std::sqrt(power / std::pow(10.0, snr_db / 10.0));
  Rng rng(seed);
  GrayImage out = img;
  for (double& v : out.pixels()) v += sigma * rng.normal();
  return out;
}

GrayImage apply_distortion(const GrayImage& img, const DistortionSpec& spec) {
  switch (spec.kind) {
    case DistortionKind::PixelMissing: return pixel_missing(img, spec.rate, spec.seed);
    case DistortionKind::BlockMissing: return block_missing(img, spec.block_height, spec.block_width, spec.anchor);
    case DistortionKind::Awgn: return awgn(img, spec.snr_db, spec.seed);
  }
  throw Error(ErrorKind::InvalidSpec, "unknown distortion");
}

}  // namespace atp
