#pragma once

#include <filesystem>

#include "atp/image.hpp"

namespace atp {

// Reads 8-bit grayscale or RGB data from PGM (P5), BMP (8/24-bit,
// uncompressed) or PNG. Colour is reduced with BT.601 luma.
GrayImage load_image(const std::filesystem::path& path);

// Writers quantize to 8 bits (round to nearest, clamp to [0, 255]).
void save_pgm(const GrayImage& img, const std::filesystem::path& path);
void save_bmp(const GrayImage& img, const std::filesystem::path& path);
void save_png(const GrayImage& img, const std::filesystem::path& path);

// Dispatches on the file extension (.pgm, .bmp, .png).
void save_image(const GrayImage& img, const std::filesystem::path& path);

}  // namespace atp
