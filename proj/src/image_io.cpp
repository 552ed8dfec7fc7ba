#include "chinpaint/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>

#include "chinpaint/errors.hpp"

namespace chinpaint {

namespace {

class PgmReader {
 public:
  explicit PgmReader(std::span<const std::uint8_t> bytes) : b_(bytes) {}

  std::size_t pos() const { return pos_; }

  void skip_space_and_comments() {
    while (pos_ < b_.size()) {
      if (b_[pos_] == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else if (std::isspace(b_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  unsigned long number(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    unsigned long v = 0;
    while (pos_ < b_.size() && std::isdigit(b_[pos_])) {
      v = v * 10 + (b_[pos_] - '0');
      if (v > 1u << 30) throw FormatError(std::string("PGM: ") + what + " too large", start);
      ++pos_;
    }
    if (pos_ == start) {
      if (pos_ >= b_.size()) throw FormatError(std::string("PGM: truncated before ") + what, pos_);
      throw FormatError(std::string("PGM: expected ") + what, pos_);
    }
    return v;
  }

  std::span<const std::uint8_t> rest() const { return b_.subspan(pos_); }
  void advance(std::size_t n) { pos_ += n; }
  bool at_end() const { return pos_ >= b_.size(); }
  std::uint8_t peek() const { return b_[pos_]; }

 private:
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

bool has_png_signature(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

Grayscale8Image decode_png(std::span<const std::uint8_t> bytes) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
    throw FormatError(std::string("PNG: ") + image.message, 0);
  if (image.format & (PNG_FORMAT_FLAG_COLOR | PNG_FORMAT_FLAG_ALPHA | PNG_FORMAT_FLAG_LINEAR)) {
    png_image_free(&image);
    throw FormatError("PNG: only 8-bit grayscale images without alpha are supported", 0);
  }
  image.format = PNG_FORMAT_GRAY;
  Grayscale8Image img(image.width, image.height);
  if (!png_image_finish_read(&image, nullptr, img.pixels.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw FormatError("PNG: " + msg, 0);
  }
  return img;
}

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string() + " for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

Grayscale8Image decode_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5'))
    throw FormatError("not a P2/P5 PGM file", 0);
  const bool binary = bytes[1] == '5';
  PgmReader r(bytes);
  r.advance(2);
  const auto width = r.number("width");
  const auto height = r.number("height");
  r.skip_space_and_comments();
  const std::size_t maxval_at = r.pos();
  const auto maxval = r.number("maxval");
  if (maxval != 255) throw FormatError("PGM: maxval must be 255, got " + std::to_string(maxval), maxval_at);
  if (width == 0 || height == 0) throw FormatError("PGM: empty image", maxval_at);

  Grayscale8Image img(width, height);
  const std::size_t count = img.pixels.size();
  if (binary) {
    // Exactly one whitespace byte separates the header from the raster.
    if (r.at_end() || !std::isspace(r.peek())) throw FormatError("PGM: missing raster separator", r.pos());
    r.advance(1);
    const auto raster = r.rest();
    if (raster.size() < count)
      throw FormatError("PGM: truncated raster, expected " + std::to_string(count) + " bytes",
                        r.pos() + raster.size());
    std::copy_n(raster.begin(), count, img.pixels.begin());
  } else {
    for (std::size_t k = 0; k < count; ++k) {
      r.skip_space_and_comments();
      const std::size_t at = r.pos();
      const auto v = r.number("pixel value");
      if (v > 255) throw FormatError("PGM: pixel value exceeds maxval", at);
      img.pixels[k] = static_cast<std::uint8_t>(v);
    }
  }
  return img;
}

std::vector<std::uint8_t> encode_pgm(const Grayscale8Image& img) {
  const std::string header = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.pixels.begin(), img.pixels.end());
  return out;
}

Grayscale8Image read_image(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  try {
    if (has_png_signature(bytes)) return decode_png(bytes);
    return decode_pgm(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what(), e.offset());
  }
}

void write_image(const Grayscale8Image& img, const std::filesystem::path& path) {
  if (img.pixels.size() != img.width * img.height) throw ShapeError("write_image: pixel buffer size mismatch");
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".png") {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width);
    image.height = static_cast<png_uint_32>(img.height);
    image.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&image, path.c_str(), 0, img.pixels.data(), 0, nullptr))
      throw Error("cannot write " + path.string() + ": " + image.message);
    return;
  }
  const auto bytes = encode_pgm(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace chinpaint
