#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "chinpaint/image.hpp"

namespace chinpaint {

// 8-bit grayscale PGM (P2 ASCII or P5 binary, maxval 255) and PNG.
// The format is chosen by content on read and by extension (.png) on write.
Grayscale8Image read_image(const std::filesystem::path& path);
void write_image(const Grayscale8Image& img, const std::filesystem::path& path);

Grayscale8Image decode_pgm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_pgm(const Grayscale8Image& img);  // P5

}  // namespace chinpaint
