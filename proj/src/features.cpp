#include "atp/features.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <exception>
#include <fstream>
#include <string>

#include "atp/error.hpp"
#include "atp/pattern.hpp"
#include "atp/serial.hpp"
#include "atp/wavelet.hpp"
#include "detail/pipeline.hpp"

namespace atp {

namespace {

struct ParallelKernels {
  static GrayImage diffuse(const GrayImage& img, const DiffusionParams& p) { return atp::diffuse(img, p); }
  static HaarBands dwt(const GrayImage& img) { return atp::haar_dwt2(img); }
  static GrayImage pattern(const GrayImage& img, std::span<const double> t) { return atp::atp_transform(img, t); }
};

struct SerialKernels {
  static GrayImage diffuse(const GrayImage& img, const DiffusionParams& p) { return serial::diffuse(img, p); }
  static HaarBands dwt(const GrayImage& img) { return serial::haar_dwt2(img); }
  static GrayImage pattern(const GrayImage& img, std::span<const double> t) { return serial::atp_transform(img, t); }
};

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

void check_labels(std::span<const FeatureVector> rows, std::span<const int> labels) {
  if (rows.size() != labels.size()) throw Error(ErrorKind::LengthMismatch, "one label per feature row required");
  for (const auto& r : rows) {
    if (r.size() != rows.front().size()) throw Error(ErrorKind::DimensionMismatch, "ragged feature matrix");
  }
}

void put_u64(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>(v >> (8 * i));
  out.write(bytes, 8);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& in, const std::filesystem::path& path) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) {
    throw Error(ErrorKind::IoError, path.string() + ": truncated feature file");
  }
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

constexpr char kMagic[8] = {'A', 'T', 'P', 'F', 'E', 'A', 'T', '1'};

template <class Kernels>
std::vector<FeatureVector> batch_with(std::span<const GrayImage> images, const FeatureConfig& config,
                                      [[maybe_unused]] bool parallel) {
  config.validate();
  std::vector<FeatureVector> out(images.size());
  std::exception_ptr failure;
  const auto n = static_cast<std::ptrdiff_t>(images.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      const auto& img = images[static_cast<std::size_t>(i)];
      if (img.rows() != config.working_size || img.cols() != config.working_size) {
        throw Error(ErrorKind::LayoutMismatch, "image is not at the working size");
      }
      out[static_cast<std::size_t>(i)] = detail::extract_with<Kernels>(img, config.thresholds, config.diffusion);
    } catch (...) {
#pragma omp critical(atp_batch_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace

std::span<const double> FeatureVector::segment(std::string_view name) const {
  for (const auto& s : layout) {
    if (s.name == name) return std::span<const double>(values).subspan(s.offset, s.length);
  }
  throw Error(ErrorKind::LayoutMismatch, "no feature segment named " + std::string(name));
}

void FeatureConfig::validate() const {
  if (working_size < 17) {
    // a3 = ceil(S / 8) must hold a 3x3 neighbourhood.
    throw Error(ErrorKind::InvalidParams, "working size must be at least 17");
  }
  diffusion.validate();
  thresholds.validate();
}

nlohmann::json FeatureConfig::to_json() const {
  return {{"working_size", working_size},
          {"diffusion", {{"sigma", diffusion.sigma}, {"iterations", diffusion.iterations}, {"step", diffusion.step}}},
          {"thresholds", thresholds.to_json()},
          {"segments", segment_names()}};
}

std::uint64_t FeatureConfig::hash() const { return fnv1a(to_json().dump()); }

const std::vector<std::string>& segment_names() {
  static const std::vector<std::string> names = {"AD", "a1", "a2", "P1", "P2", "P3", "P4",
                                                 "P5", "P6", "P7", "P8", "P9", "P10"};
  return names;
}

std::vector<Segment> feature_layout(std::size_t rows, std::size_t cols) {
  auto half = [](std::size_t n) { return (n + 1) / 2; };
  const std::size_t l0 = rows * cols;
  const std::size_t l1 = half(rows) * half(cols);
  const std::size_t l2 = half(half(rows)) * half(half(cols));
  const std::size_t l3 = half(half(half(rows))) * half(half(half(cols)));
  const std::size_t lengths[13] = {l0, l1, l2, l1, l1, l1, l2, l2, l2, l3, l3, l3, l3};

  std::vector<Segment> layout;
  std::size_t offset = 0;
  for (std::size_t i = 0; i < 13; ++i) {
    layout.push_back({segment_names()[i], offset, lengths[i]});
    offset += lengths[i];
  }
  return layout;
}

FeatureVector extract_features(const GrayImage& img, const ThresholdTable& table, const DiffusionParams& ad) {
  return detail::extract_with<ParallelKernels>(img, table, ad);
}

FeatureVector extract_features(const GrayImage& img, const FeatureConfig& config) {
  config.validate();
  if (img.rows() != config.working_size || img.cols() != config.working_size) {
    throw Error(ErrorKind::LayoutMismatch, "image is " + std::to_string(img.rows()) + "x" +
                                               std::to_string(img.cols()) + ", working size is " +
                                               std::to_string(config.working_size));
  }
  return extract_features(img, config.thresholds, config.diffusion);
}

std::vector<FeatureVector> extract_batch(std::span<const GrayImage> images, const FeatureConfig& config) {
  return batch_with<ParallelKernels>(images, config, true);
}

std::vector<FeatureVector> serial::extract_batch(std::span<const GrayImage> images, const FeatureConfig& config) {
  return batch_with<SerialKernels>(images, config, false);
}

void write_feature_csv(const std::filesystem::path& path, std::span<const FeatureVector> rows,
                       std::span<const int> labels) {
  check_labels(rows, labels);
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << "label";
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  for (std::size_t c = 0; c < cols; ++c) out << ",f" << c;
  out << '\n';
  char buf[32];
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out << labels[r];
    for (double v : rows[r].values) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << ',' << buf;
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
}

void write_feature_binary(const std::filesystem::path& path, std::span<const FeatureVector> rows,
                          std::span<const int> labels) {
  check_labels(rows, labels);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out.write(kMagic, sizeof kMagic);
  put_u64(out, rows.size());
  put_u64(out, rows.empty() ? 0 : rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    put_f64(out, static_cast<double>(labels[r]));
    for (double v : rows[r].values) put_f64(out, v);
  }
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
}

FeatureMatrix read_feature_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::FileNotFound, path.string());
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) {
    throw Error(ErrorKind::IoError, path.string() + ": not a feature record file");
  }
  const std::uint64_t n = get_u64(in, path);
  const std::uint64_t cols = get_u64(in, path);
  FeatureMatrix m;
  m.labels.reserve(n);
  m.rows.reserve(n);
  for (std::uint64_t r = 0; r < n; ++r) {
    m.labels.push_back(static_cast<int>(std::bit_cast<double>(get_u64(in, path))));
    std::vector<double> row(cols);
    for (auto& v : row) v = std::bit_cast<double>(get_u64(in, path));
    m.rows.push_back(std::move(row));
  }
  return m;
}

}  // namespace atp
