#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "chinpaint/image.hpp"

namespace chinpaint::fixtures {

// Synthetic test images. Masks use 255 for damaged pixels.

// Left half 0, right half 255; the edge lies between columns n/2 - 1 and n/2.
Grayscale8Image stripe_image(std::size_t n);
// Square of the given area fraction centred on the stripe edge.
Grayscale8Image centred_square_mask(std::size_t n, double area_fraction);

// Four constant quadrants with the given gray levels (top-left, top-right, bottom-left, bottom-right).
Grayscale8Image quadrant_image(std::size_t n, std::array<std::uint8_t, 4> levels);
// Plus-shaped band of the given half-width around the quadrant boundaries.
Grayscale8Image cross_mask(std::size_t n, std::size_t half_width);

// Random axis-aligned blocks until roughly area_fraction of the pixels are damaged.
Grayscale8Image random_block_mask(std::size_t width, std::size_t height, double area_fraction,
                                  std::uint64_t seed);

}  // namespace chinpaint::fixtures
