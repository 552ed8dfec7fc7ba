// Writes synthetic image/mask pairs for trying out the inpainting tool.
#include <CLI11.hpp>
#include <iostream>

#include "chinpaint/errors.hpp"
#include "chinpaint/fixtures.hpp"
#include "chinpaint/image_io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate synthetic inpainting fixtures"};
  std::string kind = "stripe", image_path, mask_path;
  std::size_t size = 128;
  double fraction = 0.2;
  std::uint64_t seed = 0;
  bool random_mask = false;
  app.add_option("--kind", kind, "stripe | quadrants")->check(CLI::IsMember({"stripe", "quadrants"}));
  app.add_option("--size", size, "Image side length in pixels")->check(CLI::Range(4, 4096));
  app.add_option("--damage", fraction, "Damaged area fraction")->check(CLI::Range(0.01, 0.9));
  app.add_option("--image", image_path, "Output image path")->required();
  app.add_option("--mask", mask_path, "Output mask path")->required();
  app.add_flag("--random-mask", random_mask, "Scattered random blocks instead of the default shape");
  app.add_option("--seed", seed, "Seed for --random-mask");
  CLI11_PARSE(app, argc, argv);

  namespace fx = chinpaint::fixtures;
  try {
    const auto image = kind == "stripe" ? fx::stripe_image(size) : fx::quadrant_image(size, {32, 96, 160, 224});
    chinpaint::Grayscale8Image mask;
    if (random_mask) {
      mask = fx::random_block_mask(size, size, fraction, seed);
    } else if (kind == "stripe") {
      mask = fx::centred_square_mask(size, fraction);
    } else {
      // Cross arms of half-width w cover about 4 w / size of the area.
      mask = fx::cross_mask(size, std::max<std::size_t>(1, static_cast<std::size_t>(fraction * size / 4)));
    }
    chinpaint::write_image(image, image_path);
    chinpaint::write_image(mask, mask_path);
  } catch (const chinpaint::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
