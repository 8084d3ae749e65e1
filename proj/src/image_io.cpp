#include "atp/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "atp/error.hpp"

namespace atp {

namespace fs = std::filesystem;

namespace {

using Bytes = std::vector<std::uint8_t>;

double luma(double r, double g, double b) { return 0.299 * r + 0.587 * g + 0.114 * b; }

std::uint8_t quantize(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

[[noreturn]] void corrupt(const fs::path& path, const std::string& what) {
  throw Error(ErrorKind::CorruptImage, path.string() + ": " + what);
}

Bytes read_file(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw Error(ErrorKind::FileNotFound, path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::FileNotFound, path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const fs::path& path, const Bytes& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
}

// ---- PGM (P5) -------------------------------------------------------------

class HeaderReader {
 public:
  HeaderReader(const Bytes& bytes, const fs::path& path) : bytes_(bytes), path_(path) {}

  unsigned long next_number() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) corrupt(path_, "malformed PGM header");
    unsigned long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_++] - '0');
      if (value > 1'000'000'000ul) corrupt(path_, "PGM header value out of range");
    }
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) corrupt(path_, "malformed PGM header");
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const Bytes& bytes_;
  const fs::path& path_;
  std::size_t pos_ = 2;
};

GrayImage decode_pgm(const Bytes& bytes, const fs::path& path) {
  HeaderReader header(bytes, path);
  const auto width = header.next_number();
  const auto height = header.next_number();
  const auto maxval = header.next_number();
  if (width == 0 || height == 0) corrupt(path, "zero image dimension");
  if (maxval == 0) corrupt(path, "zero maxval");
  if (maxval > 255) throw Error(ErrorKind::UnsupportedFormat, path.string() + ": 16-bit PGM");
  const std::size_t offset = header.raster_offset();
  const std::size_t count = width * height;
  if (bytes.size() < offset + count) corrupt(path, "truncated PGM raster");

  std::vector<double> data(count);
  const double gain = 255.0 / static_cast<double>(maxval);
  for (std::size_t i = 0; i < count; ++i) {
    const auto v = bytes[offset + i];
    if (v > maxval) corrupt(path, "sample exceeds maxval");
    data[i] = maxval == 255 ? static_cast<double>(v) : v * gain;
  }
  return GrayImage(height, width, std::move(data));
}

// ---- BMP ------------------------------------------------------------------

std::uint32_t le32(const Bytes& b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | static_cast<std::uint32_t>(b[at + 1]) << 8 |
         static_cast<std::uint32_t>(b[at + 2]) << 16 | static_cast<std::uint32_t>(b[at + 3]) << 24;
}
std::uint16_t le16(const Bytes& b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | b[at + 1] << 8);
}
void put32(Bytes& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void put16(Bytes& b, std::uint16_t v) {
  b.push_back(static_cast<std::uint8_t>(v));
  b.push_back(static_cast<std::uint8_t>(v >> 8));
}

GrayImage decode_bmp(const Bytes& bytes, const fs::path& path) {
  if (bytes.size() < 54) corrupt(path, "truncated BMP header");
  const std::uint32_t data_offset = le32(bytes, 10);
  const std::uint32_t dib_size = le32(bytes, 14);
  if (dib_size < 40 || 14 + dib_size > bytes.size()) corrupt(path, "truncated BMP header");
  const auto width = static_cast<std::int32_t>(le32(bytes, 18));
  const auto raw_height = static_cast<std::int32_t>(le32(bytes, 22));
  const std::uint16_t bpp = le16(bytes, 28);
  const std::uint32_t compression = le32(bytes, 30);
  std::uint32_t palette_size = le32(bytes, 46);

  if (width <= 0 || raw_height == 0) corrupt(path, "invalid BMP dimensions");
  if (compression != 0) {
    throw Error(ErrorKind::UnsupportedFormat, path.string() + ": compressed BMP");
  }
  if (bpp != 8 && bpp != 24 && bpp != 32) {
    throw Error(ErrorKind::UnsupportedFormat, path.string() + ": " + std::to_string(bpp) + "-bit BMP");
  }
  const bool top_down = raw_height < 0;
  const std::size_t rows = static_cast<std::size_t>(top_down ? -static_cast<std::int64_t>(raw_height)
                                                             : raw_height);
  const auto cols = static_cast<std::size_t>(width);

  std::vector<double> palette;
  if (bpp == 8) {
    if (palette_size == 0) palette_size = 256;
    if (palette_size > 256) corrupt(path, "oversized BMP palette");
    const std::size_t palette_at = 14 + dib_size;
    if (palette_at + 4 * palette_size > bytes.size()) corrupt(path, "truncated BMP palette");
    palette.resize(palette_size);
    for (std::size_t i = 0; i < palette_size; ++i) {
      const std::size_t e = palette_at + 4 * i;  // B, G, R, reserved
      const bool gray = bytes[e] == bytes[e + 1] && bytes[e + 1] == bytes[e + 2];
      palette[i] = gray ? bytes[e] : luma(bytes[e + 2], bytes[e + 1], bytes[e]);
    }
  }

  const std::size_t bytes_pp = bpp / 8;
  const std::size_t stride = (cols * bytes_pp + 3) & ~std::size_t{3};
  if (static_cast<std::size_t>(data_offset) + stride * rows > bytes.size()) {
    corrupt(path, "truncated BMP pixel data");
  }

  std::vector<double> data(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t src_row = top_down ? r : rows - 1 - r;
    const std::size_t base = data_offset + src_row * stride;
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t p = base + c * bytes_pp;
      if (bpp == 8) {
        const auto idx = bytes[p];
        if (idx >= palette.size()) corrupt(path, "palette index out of range");
        data[r * cols + c] = palette[idx];
      } else {
        data[r * cols + c] = luma(bytes[p + 2], bytes[p + 1], bytes[p]);
      }
    }
  }
  return GrayImage(rows, cols, std::move(data));
}

// ---- PNG (libpng simplified API) -----------------------------------------

GrayImage decode_png(const Bytes& bytes, const fs::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    corrupt(path, image.message);
  }
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&image);
    throw Error(ErrorKind::UnsupportedFormat, path.string() + ": 16-bit PNG");
  }
  const bool colour = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = colour ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const std::size_t channels = colour ? 3 : 1;
  const std::size_t rows = image.height;
  const std::size_t cols = image.width;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    corrupt(path, image.message);
  }

  std::vector<double> data(rows * cols);
  for (std::size_t i = 0; i < rows * cols; ++i) {
    const png_byte* p = &buffer[i * channels];
    data[i] = colour ? luma(p[0], p[1], p[2]) : static_cast<double>(p[0]);
  }
  return GrayImage(rows, cols, std::move(data));
}

bool has_extension(const fs::path& path, const char* ext) {
  std::string e = path.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return e == ext;
}

}  // namespace

GrayImage load_image(const fs::path& path) {
  const Bytes bytes = read_file(path);
  static constexpr std::uint8_t kPngMagic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

  if (bytes.size() >= 8 && std::equal(std::begin(kPngMagic), std::end(kPngMagic), bytes.begin())) {
    return decode_png(bytes, path);
  }
  if (bytes.size() >= 2 && bytes[0] == 'B' && bytes[1] == 'M') return decode_bmp(bytes, path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') return decode_pgm(bytes, path);

  // Recognised by extension but without a valid signature.
  if (has_extension(path, ".bmp") || has_extension(path, ".png") || has_extension(path, ".pgm")) {
    corrupt(path, "missing or damaged file signature");
  }
  throw Error(ErrorKind::UnsupportedFormat, path.string());
}

void save_pgm(const GrayImage& img, const fs::path& path) {
  const std::string header =
      "P5\n" + std::to_string(img.cols()) + " " + std::to_string(img.rows()) + "\n255\n";
  Bytes bytes(header.begin(), header.end());
  bytes.reserve(header.size() + img.size());
  for (double v : img.pixels()) bytes.push_back(quantize(v));
  write_file(path, bytes);
}

void save_bmp(const GrayImage& img, const fs::path& path) {
  const std::size_t stride = (img.cols() + 3) & ~std::size_t{3};
  const std::uint32_t data_offset = 14 + 40 + 256 * 4;
  const auto file_size = static_cast<std::uint32_t>(data_offset + stride * img.rows());

  Bytes b;
  b.reserve(file_size);
  b.push_back('B');
  b.push_back('M');
  put32(b, file_size);
  put32(b, 0);
  put32(b, data_offset);
  put32(b, 40);
  put32(b, static_cast<std::uint32_t>(img.cols()));
  put32(b, static_cast<std::uint32_t>(img.rows()));
  put16(b, 1);
  put16(b, 8);
  put32(b, 0);
  put32(b, static_cast<std::uint32_t>(stride * img.rows()));
  put32(b, 2835);  // 72 dpi
  put32(b, 2835);
  put32(b, 256);
  put32(b, 0);
  for (unsigned i = 0; i < 256; ++i) {
    const auto g = static_cast<std::uint8_t>(i);
    b.insert(b.end(), {g, g, g, 0});
  }
  for (std::size_t r = img.rows(); r-- > 0;) {
    for (std::size_t c = 0; c < img.cols(); ++c) b.push_back(quantize(img(r, c)));
    b.resize(b.size() + (stride - img.cols()), 0);
  }
  write_file(path, b);
}

void save_png(const GrayImage& img, const fs::path& path) {
  std::vector<png_byte> buffer(img.size());
  std::transform(img.pixels().begin(), img.pixels().end(), buffer.begin(), quantize);
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.cols());
  image.height = static_cast<png_uint_32>(img.rows());
  image.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, buffer.data(), 0, nullptr)) {
    throw Error(ErrorKind::IoError, path.string() + ": " + image.message);
  }
}

void save_image(const GrayImage& img, const fs::path& path) {
  if (has_extension(path, ".pgm")) return save_pgm(img, path);
  if (has_extension(path, ".bmp")) return save_bmp(img, path);
  if (has_extension(path, ".png")) return save_png(img, path);
  throw Error(ErrorKind::UnsupportedFormat, "cannot infer output format for " + path.string());
}

}  // namespace atp
