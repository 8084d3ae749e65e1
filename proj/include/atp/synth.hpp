#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "json.hpp"

#include "atp/image.hpp"

namespace atp {

/// Parameters of the synthetic two-class fingerprint fixture.
///
/// Real prints are oriented sinusoidal ridges whose orientation drifts
/// smoothly over the image, plus fine additive texture. Fakes run the same
/// generator, then a Gaussian blur and a contrast squeeze toward mid-gray,
/// so they are smoother and flatter than their real counterparts.
struct SynthSpec {
  std::size_t count_per_class = 60;
  std::size_t rows = 96;
  std::size_t cols = 96;
  std::uint64_t seed = 1;

  // Ridge frequency band, cycles per pixel.
  double freq_min = 0.09;
  double freq_max = 0.13;
  // Peak deviation of the orientation field (radians) and the spatial period
  // of its variation in pixels; larger periods give smoother fields.
  double orientation_amplitude = 0.8;
  double orientation_period = 80.0;
  double texture_sigma = 12.0;

  double blur_radius = 1.5;   // Gaussian sigma in pixels; 0 disables the blur
  double contrast = 0.6;      // fake = 128 + contrast * (x - 128); 1 disables

  void validate() const;  // throws InvalidSpec
  nlohmann::json to_json() const;
  static SynthSpec from_json(const nlohmann::json& j);
};

struct LabeledImage {
  GrayImage image;
  int label = -1;  // +1 fake, -1 real
  std::string name;
};

/// count_per_class real images followed by count_per_class fakes. Each
/// image draws from its own derived seed, so the batch is generated in
/// parallel and stays bit-identical to a serial run.
std::vector<LabeledImage> generate(const SynthSpec& spec);

/// Writes `root/real/*.pgm` and `root/fake/*.pgm`.
void write_dataset(const std::vector<LabeledImage>& images, const std::filesystem::path& root);

GrayImage gaussian_blur(const GrayImage& img, double sigma);

// Mean of sqrt(dx^2 + dy^2) over forward differences.
double mean_gradient_magnitude(const GrayImage& img);

}  // namespace atp
