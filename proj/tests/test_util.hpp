#pragma once

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "atp/image.hpp"

namespace atp::testing {

inline GrayImage random_image(std::mt19937_64& gen, std::size_t rows, std::size_t cols, double lo = 0.0,
                              double hi = 255.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> data(rows * cols);
  for (auto& v : data) v = dist(gen);
  return GrayImage(rows, cols, std::move(data));
}

inline GrayImage integer_image(std::mt19937_64& gen, std::size_t rows, std::size_t cols) {
  std::uniform_int_distribution<int> dist(0, 255);
  std::vector<double> data(rows * cols);
  for (auto& v : data) v = dist(gen);
  return GrayImage(rows, cols, std::move(data));
}

inline double max_abs_diff(const GrayImage& a, const GrayImage& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.pixels()[i] - b.pixels()[i]));
  return m;
}

inline double energy(const GrayImage& img) {
  double s = 0.0;
  for (double v : img.pixels()) s += v * v;
  return s;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("atp_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_bytes(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace atp::testing
