#include "atp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "atp/error.hpp"
#include "atp/image_io.hpp"
#include "atp/random.hpp"

namespace atp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

GrayImage ridge_pattern(const SynthSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  const double theta0 = rng.uniform() * std::numbers::pi;
  const double freq = spec.freq_min + rng.uniform() * (spec.freq_max - spec.freq_min);
  const double phase = rng.uniform() * kTwoPi;
  const double phase_x = rng.uniform() * kTwoPi;
  const double phase_y = rng.uniform() * kTwoPi;

  GrayImage img(spec.rows, spec.cols);
  for (std::size_t r = 0; r < spec.rows; ++r) {
    const auto y = static_cast<double>(r);
    for (std::size_t c = 0; c < spec.cols; ++c) {
      const auto x = static_cast<double>(c);
      const double theta = theta0 + spec.orientation_amplitude *
                                        std::sin(kTwoPi * x / spec.orientation_period + phase_x) *
                                        std::cos(kTwoPi * y / spec.orientation_period + phase_y);
      const double ridge = std::cos(kTwoPi * freq * (x * std::cos(theta) + y * std::sin(theta)) + phase);
      img(r, c) = 128.0 + 100.0 * ridge + spec.texture_sigma * rng.normal();
    }
  }
  return img;
}

void clamp_to_byte_range(GrayImage& img) {
  for (double& v : img.pixels()) v = std::clamp(v, 0.0, 255.0);
}

}  // namespace

void SynthSpec::validate() const {
  if (count_per_class < 1) throw Error(ErrorKind::InvalidSpec, "count_per_class must be at least 1");
  if (rows < 16 || cols < 16) throw Error(ErrorKind::InvalidSpec, "synthetic images must be at least 16x16");
  if (!(freq_min > 0.0) || freq_max < freq_min || freq_max > 0.5) {
    throw Error(ErrorKind::InvalidSpec, "ridge frequency band must satisfy 0 < min <= max <= 0.5");
  }
  if (!(orientation_period > 0.0)) throw Error(ErrorKind::InvalidSpec, "orientation_period must be positive");
  if (texture_sigma < 0.0) throw Error(ErrorKind::InvalidSpec, "texture_sigma must be non-negative");
  if (blur_radius < 0.0) throw Error(ErrorKind::InvalidSpec, "blur_radius must be non-negative");
  if (!(contrast > 0.0 && contrast <= 1.0)) throw Error(ErrorKind::InvalidSpec, "contrast must lie in (0, 1]");
}

nlohmann::json SynthSpec::to_json() const {
  return {{"count_per_class", count_per_class},
          {"rows", rows},
          {"cols", cols},
          {"seed", seed},
          {"freq_min", freq_min},
          {"freq_max", freq_max},
          {"orientation_amplitude", orientation_amplitude},
          {"orientation_period", orientation_period},
          {"texture_sigma", texture_sigma},
          {"blur_radius", blur_radius},
          {"contrast", contrast}};
}

SynthSpec SynthSpec::from_json(const nlohmann::json& j) {
  SynthSpec s;
  try {
    s.count_per_class = j.value("count_per_class", s.count_per_class);
    s.rows = j.value("rows", s.rows);
    s.cols = j.value("cols", s.cols);
    s.seed = j.value("seed", s.seed);
    s.freq_min = j.value("freq_min", s.freq_min);
    s.freq_max = j.value("freq_max", s.freq_max);
    s.orientation_amplitude = j.value("orientation_amplitude", s.orientation_amplitude);
    s.orientation_period = j.value("orientation_period", s.orientation_period);
    s.texture_sigma = j.value("texture_sigma", s.texture_sigma);
    s.blur_radius = j.value("blur_radius", s.blur_radius);
    s.contrast = j.value("contrast", s.contrast);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidSpec, e.what());
  }
  s.validate();
  return s;
}

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
  if (sigma <= 0.0) return img;
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
    const double w = std::exp(-static_cast<double>(i * i) / (2.0 * sigma * sigma));
    kernel[static_cast<std::size_t>(i + radius)] = w;
    sum += w;
  }
  for (double& w : kernel) w /= sum;

  GrayImage tmp(img.rows(), img.cols());
  for (std::size_t r = 0; r < img.rows(); ++r) {
    for (std::size_t c = 0; c < img.cols(); ++c) {
      double acc = 0.0;
      for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
        acc += kernel[static_cast<std::size_t>(i + radius)] *
               img.at_clamped(static_cast<std::ptrdiff_t>(r), static_cast<std::ptrdiff_t>(c) + i);
      }
      tmp(r, c) = acc;
    }
  }
  GrayImage out(img.rows(), img.cols());
  for (std::size_t r = 0; r < img.rows(); ++r) {
    for (std::size_t c = 0; c < img.cols(); ++c) {
      double acc = 0.0;
      for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
        acc += kernel[static_cast<std::size_t>(i + radius)] *
               tmp.at_clamped(static_cast<std::ptrdiff_t>(r) + i, static_cast<std::ptrdiff_t>(c));
      }
      out(r, c) = acc;
    }
  }
  return out;
}

double mean_gradient_magnitude(const GrayImage& img) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t r = 0; r + 1 < img.rows(); ++r) {
    for (std::size_t c = 0; c + 1 < img.cols(); ++c) {
      const double dx = img(r, c + 1) - img(r, c);
      const double dy = img(r + 1, c) - img(r, c);
      sum += std::sqrt(dx * dx + dy * dy);
      ++n;
    }
  }
  return n > 0 ? sum / static_cast<double>(n) : 0.0;
}

std::vector<LabeledImage> generate(const SynthSpec& spec) {
  spec.validate();
  const std::size_t n = spec.count_per_class;
  std::vector<LabeledImage> out(2 * n);
  const auto total = static_cast<std::ptrdiff_t>(2 * n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t ii = 0; ii < total; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const bool fake = i >= n;
    GrayImage img = ridge_pattern(spec, derive_seed(spec.seed, i));
    if (fake) {
      img = gaussian_blur(img, spec.blur_radius);
      for (double& v : img.pixels()) v = 128.0 + spec.contrast * (v - 128.0);
    }
    clamp_to_byte_range(img);
    char name[32];
    std::snprintf(name, sizeof name, "%s_%04zu", fake ? "fake" : "real", fake ? i - n : i);
    out[i] = LabeledImage{std::move(img), fake ? 1 : -1, name};
  }
  return out;
}

void write_dataset(const std::vector<LabeledImage>& images, const std::filesystem::path& root) {
  std::error_code ec;
  std::filesystem::create_directories(root / "real", ec);
  std::filesystem::create_directories(root / "fake", ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create dataset directories under " + root.string());
  for (const auto& item : images) {
    save_pgm(item.image, root / (item.label == 1 ? "fake" : "real") / (item.name + ".pgm"));
  }
}

}  // namespace atp
