#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "chinpaint/grid.hpp"
#include "chinpaint/step_solvers.hpp"

namespace testing {

using namespace chinpaint;

// Random feasible step problem: u_prev uniform in [-1, 1] with a share of nodes
// exactly at +-1, image +-1, a random damage set.
inline StepProblem random_problem(std::size_t nx, std::size_t ny, std::mt19937_64& rng, double alpha,
                                  double eps, double tau, double contact_share = 0.0) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0), coin(0.0, 1.0);
  const GridSpec g = build_grid(nx, ny);
  StepProblem p;
  p.grid = g;
  p.u_prev = ScalarField(g);
  p.image = ScalarField(g);
  std::vector<bool> damaged(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double c = coin(rng);
    p.u_prev[k] = c < contact_share / 2 ? -1.0 : (c < contact_share ? 1.0 : uni(rng));
    p.image[k] = coin(rng) < 0.5 ? -1.0 : 1.0;
    damaged[k] = coin(rng) < 0.3;
  }
  damaged[0] = true;
  damaged[g.size() - 1] = false;
  p.fidelity = make_fidelity(g, damaged, alpha);
  p.eps = eps;
  p.tau = tau;
  return p;
}

// Pure Cahn-Hilliard: lambda identically zero.
inline FidelityField no_fidelity(const GridSpec& g) { return FidelityField{g, std::vector<double>(g.size(), 0.0), 0.0}; }

inline double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

inline double max_abs(const ScalarField& a) {
  double d = 0.0;
  for (double v : a.values) d = std::max(d, std::abs(v));
  return d;
}

inline double relative_mass_drift(const GridSpec& g, const ScalarField& a, const ScalarField& b) {
  return std::abs(lumped_integral(g, a) - lumped_integral(g, b)) / g.area();
}

}  // namespace testing
