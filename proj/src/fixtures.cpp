#include "chinpaint/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "chinpaint/errors.hpp"

namespace chinpaint::fixtures {

Grayscale8Image stripe_image(std::size_t n) {
  Grayscale8Image img(n, n);
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t x = 0; x < n; ++x) img.at(x, y) = x < n / 2 ? 0 : 255;
  return img;
}

Grayscale8Image centred_square_mask(std::size_t n, double area_fraction) {
  if (!(area_fraction > 0.0 && area_fraction < 1.0))
    throw InvalidParameterError("area fraction must lie in (0, 1)");
  const auto side = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(std::sqrt(area_fraction) * n)));
  const std::size_t lo = n / 2 - std::min(n / 2, side / 2);
  Grayscale8Image mask(n, n);
  for (std::size_t y = lo; y < std::min(n, lo + side); ++y)
    for (std::size_t x = lo; x < std::min(n, lo + side); ++x) mask.at(x, y) = 255;
  return mask;
}

Grayscale8Image quadrant_image(std::size_t n, std::array<std::uint8_t, 4> levels) {
  Grayscale8Image img(n, n);
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t x = 0; x < n; ++x) img.at(x, y) = levels[(y < n / 2 ? 0 : 2) + (x < n / 2 ? 0 : 1)];
  return img;
}

Grayscale8Image cross_mask(std::size_t n, std::size_t half_width) {
  Grayscale8Image mask(n, n);
  const std::size_t lo = n / 2 - std::min(n / 2, half_width);
  const std::size_t hi = std::min(n, n / 2 + half_width);
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t x = 0; x < n; ++x)
      if ((x >= lo && x < hi) || (y >= lo && y < hi)) mask.at(x, y) = 255;
  return mask;
}

Grayscale8Image random_block_mask(std::size_t width, std::size_t height, double area_fraction,
                                  std::uint64_t seed) {
  if (!(area_fraction > 0.0 && area_fraction < 1.0))
    throw InvalidParameterError("area fraction must lie in (0, 1)");
  Grayscale8Image mask(width, height);
  std::mt19937_64 rng(seed);
  const std::size_t max_side = std::max<std::size_t>(1, std::min(width, height) / 8);
  std::uniform_int_distribution<std::size_t> side(1, max_side);
  std::uniform_int_distribution<std::size_t> px(0, width - 1), py(0, height - 1);
  const auto target = static_cast<std::size_t>(area_fraction * static_cast<double>(width * height));
  std::size_t damaged = 0;
  while (damaged < std::max<std::size_t>(1, target)) {
    const std::size_t x0 = px(rng), y0 = py(rng), s = side(rng);
    for (std::size_t y = y0; y < std::min(height, y0 + s); ++y)
      for (std::size_t x = x0; x < std::min(width, x0 + s); ++x)
        if (mask.at(x, y) == 0) {
          mask.at(x, y) = 255;
          ++damaged;
        }
  }
  return mask;
}

}  // namespace chinpaint::fixtures
