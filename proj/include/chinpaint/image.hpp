#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace chinpaint {

// 8-bit single-channel raster, row-major, row 0 first.
struct Grayscale8Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;

  Grayscale8Image() = default;
  Grayscale8Image(std::size_t w, std::size_t h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(w * h, fill) {}

  std::uint8_t& at(std::size_t x, std::size_t y) { return pixels[y * width + x]; }
  std::uint8_t at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }

  bool operator==(const Grayscale8Image&) const = default;
};

}  // namespace chinpaint
