#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "chinpaint/errors.hpp"
#include "chinpaint/grid.hpp"
#include "chinpaint/oracle/oracle.hpp"

using namespace chinpaint;

namespace {

ScalarField random_field(const GridSpec& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  ScalarField f(g);
  for (double& v : f.values) v = d(rng);
  return f;
}

double weight_sum(const GridSpec& g) {
  const auto w = g.lumped_weights();
  return std::accumulate(w.begin(), w.end(), 0.0);
}

}  // namespace

TEST_CASE("build_grid spacing and lumped weights") {
  const GridSpec g22 = build_grid(2, 2);
  CHECK(g22.h == 1.0);
  for (std::size_t k = 0; k < 4; ++k) CHECK(g22.weight(k) == 0.25);
  CHECK(weight_sum(g22) == doctest::Approx(1.0));

  const GridSpec big = build_grid(257, 257);
  CHECK(big.h == doctest::Approx(1.0 / 256));
  CHECK(big.h == doctest::Approx(3.9e-3).epsilon(0.01));

  const GridSpec g32 = build_grid(3, 2);
  CHECK(g32.h == 0.5);
  CHECK(weight_sum(g32) == doctest::Approx(0.5));
  CHECK(g32.area() == doctest::Approx(0.5));

  for (auto [nx, ny] : {std::pair{5, 9}, {17, 4}, {64, 64}}) {
    const GridSpec g = build_grid(nx, ny);
    CHECK(std::abs(weight_sum(g) - g.area()) <= 1e-12 * g.area());
  }
}

TEST_CASE("build_grid rejects degenerate dimensions") {
  CHECK_THROWS_AS(build_grid(1, 5), InvalidGridError);
  CHECK_THROWS_AS(build_grid(5, 0), InvalidGridError);
}

TEST_CASE("stiffness of constants and of a point load") {
  for (auto [nx, ny] : {std::pair{2, 2}, {3, 7}, {9, 9}}) {
    const GridSpec g = build_grid(nx, ny);
    const ScalarField out = stiffness_apply(g, ScalarField(g, 3.25));
    for (double v : out.values) CHECK(std::abs(v) <= 1e-14);
  }
  const GridSpec g = build_grid(3, 3);
  ScalarField f(g);
  f[g.index(1, 1)] = 1.0;
  const ScalarField out = stiffness_apply(g, f);
  CHECK(out[g.index(1, 1)] == doctest::Approx(4.0));
  for (auto [i, j] : {std::pair{0, 1}, {2, 1}, {1, 0}, {1, 2}}) CHECK(out[g.index(i, j)] == doctest::Approx(-1.0));
  for (auto [i, j] : {std::pair{0, 0}, {2, 0}, {0, 2}, {2, 2}}) CHECK(out[g.index(i, j)] == 0.0);
}

TEST_CASE("stiffness of a linear ramp matches the dense element assembly") {
  const GridSpec g = build_grid(4, 4);
  ScalarField f(g);
  for (std::size_t j = 0; j < 4; ++j)
    for (std::size_t i = 0; i < 4; ++i) f[g.index(i, j)] = g.h * static_cast<double>(i);
  const ScalarField out = stiffness_apply(g, f);
  const Eigen::MatrixXd k = oracle::dense_stiffness(g);
  const Eigen::VectorXd dense = k * Eigen::Map<const Eigen::VectorXd>(f.values.data(), 16);
  for (std::size_t n = 0; n < 16; ++n) CHECK(out[n] == doctest::Approx(dense[static_cast<Eigen::Index>(n)]).epsilon(1e-12));
  for (std::size_t j = 1; j < 3; ++j)
    for (std::size_t i = 1; i < 3; ++i) CHECK(std::abs(out[g.index(i, j)]) <= 1e-14);
}

TEST_CASE("stiffness is symmetric and positive semidefinite") {
  std::mt19937_64 rng(11);
  for (auto [nx, ny] : {std::pair{2, 3}, {6, 6}, {13, 8}}) {
    const GridSpec g = build_grid(nx, ny);
    for (int t = 0; t < 5; ++t) {
      const ScalarField a = random_field(g, rng), b = random_field(g, rng);
      const ScalarField ka = stiffness_apply(g, a), kb = stiffness_apply(g, b);
      double ab = 0, ba = 0, aa = 0, scale = 0;
      for (std::size_t k = 0; k < g.size(); ++k) {
        ab += ka[k] * b[k];
        ba += a[k] * kb[k];
        aa += ka[k] * a[k];
        scale += std::abs(ka[k] * b[k]);
      }
      CHECK(std::abs(ab - ba) <= 1e-12 * scale);
      CHECK(aa >= 0.0);
      double total = 0;
      for (double v : ka.values) total += v;
      CHECK(std::abs(total) <= 1e-12);
    }
  }
}

TEST_CASE("stiffness rejects fields from another grid") {
  const GridSpec g = build_grid(4, 4);
  CHECK_THROWS_AS(stiffness_apply(g, ScalarField(build_grid(4, 5))), ShapeError);
  CHECK_THROWS_AS(ScalarField(g, std::vector<double>(3)), ShapeError);
}

TEST_CASE("lumped inner product") {
  const GridSpec unit = build_grid(11, 11);
  CHECK(lumped_inner(unit, ScalarField(unit, 1.0), ScalarField(unit, 1.0)) == doctest::Approx(1.0));

  const GridSpec g = build_grid(2, 2);
  const ScalarField a(g, {1, 2, 3, 4});
  CHECK(lumped_inner(g, a, ScalarField(g, 1.0)) == doctest::Approx(2.5));
  CHECK(lumped_integral(g, a) == doctest::Approx(2.5));

  std::mt19937_64 rng(3);
  const GridSpec h = build_grid(7, 5);
  const ScalarField x = random_field(h, rng), y = random_field(h, rng), z = random_field(h, rng);
  CHECK(lumped_inner(h, x, y) == doctest::Approx(lumped_inner(h, y, x)));
  ScalarField xz(h);
  for (std::size_t k = 0; k < h.size(); ++k) xz[k] = 2.0 * x[k] + z[k];
  CHECK(lumped_inner(h, xz, y) == doctest::Approx(2.0 * lumped_inner(h, x, y) + lumped_inner(h, z, y)));
  CHECK_THROWS_AS(lumped_inner(h, x, ScalarField(g)), ShapeError);
}

TEST_CASE("pixel and field conversions") {
  const GridSpec g = build_grid(256, 1 + 1);
  Grayscale8Image img(256, 2);
  for (std::size_t p = 0; p < 256; ++p) {
    img.pixels[p] = static_cast<std::uint8_t>(p);
    img.pixels[256 + p] = static_cast<std::uint8_t>(255 - p);
  }
  const ScalarField f = field_from_image(img, g);
  CHECK(f[255] == 1.0);
  CHECK(f[0] == -1.0);
  CHECK(f[128] == doctest::Approx(1.0 / 255.0));
  CHECK(image_from_field(f) == img);

  const GridSpec g1 = build_grid(2, 2);
  CHECK(image_from_field(ScalarField(g1, {1.0, 1.7, -4.0, 0.0})).pixels == std::vector<std::uint8_t>{255, 255, 0, 128});
  CHECK_THROWS_AS(field_from_image(Grayscale8Image(3, 2), g1), ShapeError);
}

TEST_CASE("fidelity field marks damage exactly") {
  const GridSpec g = build_grid(3, 3);
  std::vector<bool> damaged(9, false);
  damaged[4] = true;
  const FidelityField f = make_fidelity(g, damaged, 8e3);
  for (std::size_t k = 0; k < 9; ++k) CHECK(f.lambda[k] == (k == 4 ? 0.0 : 8e3));
  CHECK(f.damaged(4));
  CHECK_THROWS_AS(make_fidelity(g, std::vector<bool>(9, false), 1.0), InvalidMaskError);
  CHECK_THROWS_AS(make_fidelity(g, std::vector<bool>(9, true), 1.0), InvalidMaskError);
  CHECK_THROWS_AS(make_fidelity(g, damaged, 0.0), InvalidParameterError);
  CHECK_THROWS_AS(make_fidelity(g, std::vector<bool>(4, true), 1.0), ShapeError);
}
