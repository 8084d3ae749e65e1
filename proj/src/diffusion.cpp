#include "atp/diffusion.hpp"

#include <cmath>
#include <string>

#include "atp/error.hpp"
#include "detail/kernels.hpp"

namespace atp {

void DiffusionParams::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorKind::InvalidParams, "diffusion sigma must be positive and finite");
  }
  if (iterations < 1) throw Error(ErrorKind::InvalidParams, "diffusion needs at least one iteration");
  if (!(step > 0.0 && step <= 0.25)) {
    throw Error(ErrorKind::InvalidParams, "diffusion step must lie in (0, 0.25], got " + std::to_string(step));
  }
}

GrayImage diffuse_step(const GrayImage& img, const DiffusionParams& params) {
  params.validate();
  const double inv_sigma = 1.0 / params.sigma;
  GrayImage out(img.rows(), img.cols());
  const auto rows = static_cast<std::ptrdiff_t>(img.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < img.cols(); ++c) {
      out(static_cast<std::size_t>(r), c) =
          detail::diffused_pixel(img, static_cast<std::size_t>(r), c, inv_sigma, params.step);
    }
  }
  return out;
}

GrayImage diffuse(const GrayImage& img, const DiffusionParams& params) {
  params.validate();
  GrayImage current = img;
  for (std::size_t t = 0; t < params.iterations; ++t) current = diffuse_step(current, params);
  return current;
}

}  // namespace atp
