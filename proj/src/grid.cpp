#include "chinpaint/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chinpaint/errors.hpp"

namespace chinpaint {

namespace {

double boundary_factor(std::size_t k, std::size_t n) { return (k == 0 || k + 1 == n) ? 0.5 : 1.0; }

}  // namespace

double GridSpec::weight(std::size_t i, std::size_t j) const {
  return h * h * boundary_factor(i, nx) * boundary_factor(j, ny);
}

std::vector<double> GridSpec::lumped_weights() const {
  std::vector<double> w(size());
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) w[index(i, j)] = weight(i, j);
  return w;
}

GridSpec build_grid(std::size_t nx, std::size_t ny) {
  if (nx < 2 || ny < 2)
    throw InvalidGridError("grid needs at least 2 nodes per direction, got " + std::to_string(nx) +
                           "x" + std::to_string(ny));
  GridSpec g;
  g.nx = nx;
  g.ny = ny;
  g.h = 1.0 / static_cast<double>(std::max(nx, ny) - 1);
  return g;
}

ScalarField::ScalarField(const GridSpec& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != g.size())
    throw ShapeError("field has " + std::to_string(values.size()) + " values, grid has " +
                     std::to_string(g.size()) + " nodes");
}

void require_same_grid(const GridSpec& g, const ScalarField& f, const char* what) {
  if (!(f.grid == g) || f.values.size() != g.size())
    throw ShapeError(std::string(what) + ": field does not live on the expected grid");
}

FidelityField make_fidelity(const GridSpec& g, const std::vector<bool>& damaged, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw InvalidParameterError("fidelity weight alpha must be positive");
  if (damaged.size() != g.size()) throw ShapeError("mask size does not match grid");
  const auto n_damaged = static_cast<std::size_t>(std::count(damaged.begin(), damaged.end(), true));
  if (n_damaged == 0) throw InvalidMaskError("damaged region is empty");
  if (n_damaged == g.size()) throw InvalidMaskError("every node is damaged");
  FidelityField fid;
  fid.grid = g;
  fid.alpha = alpha;
  fid.lambda.resize(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) fid.lambda[k] = damaged[k] ? 0.0 : alpha;
  return fid;
}

StencilTable build_stencil(const GridSpec& g) {
  StencilTable t;
  t.nodes.resize(g.size());
  auto link = [&](std::size_t a, std::size_t b, double wgt) {
    auto& na = t.nodes[a];
    na.nb[na.count] = b;
    na.coupling[na.count++] = wgt;
    na.diag += wgt;
    auto& nb = t.nodes[b];
    nb.nb[nb.count] = a;
    nb.coupling[nb.count++] = wgt;
    nb.diag += wgt;
  };
  // Insert in row-major order so each node lists its neighbours deterministically.
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) {
      const std::size_t k = g.index(i, j);
      t.nodes[k].mass = g.weight(i, j);
      if (i + 1 < g.nx) link(k, g.index(i + 1, j), boundary_factor(j, g.ny));
      if (j + 1 < g.ny) link(k, g.index(i, j + 1), boundary_factor(i, g.nx));
    }
  }
  return t;
}

void stiffness_apply(const GridSpec& g, std::span<const double> f, std::span<double> out) {
  if (f.size() != g.size() || out.size() != g.size()) throw ShapeError("stiffness_apply: size mismatch");
  const std::size_t nx = g.nx, ny = g.ny;
  for (std::size_t j = 0; j < ny; ++j) {
    const double wy = boundary_factor(j, ny);  // weight of horizontal edges in this row
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t k = j * nx + i;
      const double wx = boundary_factor(i, nx);  // weight of vertical edges in this column
      const double fk = f[k];
      double acc = 0.0;
      if (i > 0) acc += wy * (fk - f[k - 1]);
      if (i + 1 < nx) acc += wy * (fk - f[k + 1]);
      if (j > 0) acc += wx * (fk - f[k - nx]);
      if (j + 1 < ny) acc += wx * (fk - f[k + nx]);
      out[k] = acc;
    }
  }
}

ScalarField stiffness_apply(const GridSpec& g, const ScalarField& f) {
  require_same_grid(g, f, "stiffness_apply");
  ScalarField out(g);
  stiffness_apply(g, f.values, out.values);
  return out;
}

double lumped_inner(const GridSpec& g, const ScalarField& a, const ScalarField& b) {
  require_same_grid(g, a, "lumped_inner");
  require_same_grid(g, b, "lumped_inner");
  double s = 0.0;
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i) {
      const std::size_t k = g.index(i, j);
      s += g.weight(i, j) * a[k] * b[k];
    }
  return s;
}

double lumped_integral(const GridSpec& g, const ScalarField& a) {
  require_same_grid(g, a, "lumped_integral");
  double s = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) s += g.weight(k) * a[k];
  return s;
}

ScalarField field_from_image(const Grayscale8Image& img, const GridSpec& g) {
  if (img.width != g.nx || img.height != g.ny || img.pixels.size() != g.size())
    throw ShapeError("image is " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                     ", grid is " + std::to_string(g.nx) + "x" + std::to_string(g.ny));
  ScalarField f(g);
  for (std::size_t k = 0; k < g.size(); ++k) f[k] = 2.0 * (img.pixels[k] / 255.0) - 1.0;
  return f;
}

Grayscale8Image image_from_field(const ScalarField& f) {
  Grayscale8Image img(f.grid.nx, f.grid.ny);
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double v = std::clamp(f[k], -1.0, 1.0);
    img.pixels[k] = static_cast<std::uint8_t>(std::lround(255.0 * (v + 1.0) / 2.0));
  }
  return img;
}

}  // namespace chinpaint
