#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "chinpaint/image.hpp"

namespace chinpaint {

// Uniform node grid on a rectangle whose longer side has unit length.
// Nodes are numbered row-major: index = j * nx + i, i along x.
struct GridSpec {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double h = 0.0;

  std::size_t size() const { return nx * ny; }
  std::size_t index(std::size_t i, std::size_t j) const { return j * nx + i; }

  // Lumped-mass weight: h^2 scaled by 1/2 per boundary direction the node sits on.
  double weight(std::size_t i, std::size_t j) const;
  double weight(std::size_t node) const { return weight(node % nx, node / nx); }
  std::vector<double> lumped_weights() const;
  double area() const { return h * h * static_cast<double>((nx - 1) * (ny - 1)); }

  bool operator==(const GridSpec&) const = default;
};

GridSpec build_grid(std::size_t nx, std::size_t ny);

struct ScalarField {
  GridSpec grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const GridSpec& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
  ScalarField(const GridSpec& g, std::vector<double> v);

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t k) { return values[k]; }
  double operator[](std::size_t k) const { return values[k]; }
};

// lambda_j is 0 on damaged nodes and alpha elsewhere.
struct FidelityField {
  GridSpec grid;
  std::vector<double> lambda;
  double alpha = 0.0;

  bool damaged(std::size_t k) const { return lambda[k] == 0.0; }
};

// Throws InvalidMaskError unless the damage set is a nonempty proper subset.
FidelityField make_fidelity(const GridSpec& g, const std::vector<bool>& damaged, double alpha);

// Precomputed nodal couplings of the Neumann stiffness form, used by the sweeps.
struct StencilTable {
  struct Node {
    std::array<std::size_t, 4> nb{};
    std::array<double, 4> coupling{};  // positive edge weights; K_jk = -coupling
    int count = 0;
    double diag = 0.0;                 // K_jj
    double mass = 0.0;                 // m_j
  };
  std::vector<Node> nodes;
};

StencilTable build_stencil(const GridSpec& g);

// (K f)_j = (grad f, grad phi_j) for lumped P1 on right triangles: unit weight on
// interior edges, one half on edges lying along the boundary.
ScalarField stiffness_apply(const GridSpec& g, const ScalarField& f);
void stiffness_apply(const GridSpec& g, std::span<const double> f, std::span<double> out);

double lumped_inner(const GridSpec& g, const ScalarField& a, const ScalarField& b);
double lumped_integral(const GridSpec& g, const ScalarField& a);

ScalarField field_from_image(const Grayscale8Image& img, const GridSpec& g);
Grayscale8Image image_from_field(const ScalarField& f);

void require_same_grid(const GridSpec& g, const ScalarField& f, const char* what);

}  // namespace chinpaint
