#pragma once

#include <string_view>

#include "chinpaint/grid.hpp"

namespace chinpaint {

enum class PotentialKind { Obstacle, MoreauYosida, Quartic };

struct PotentialSpec {
  PotentialKind kind = PotentialKind::Obstacle;
  double delta = 0.0;  // only meaningful for MoreauYosida

  static PotentialSpec obstacle() { return {PotentialKind::Obstacle, 0.0}; }
  static PotentialSpec moreau_yosida(double delta);
  static PotentialSpec quartic() { return {PotentialKind::Quartic, 0.0}; }
};

std::string_view to_string(PotentialKind kind);

/// Moreau-Yosida approximation of the subdifferential of the indicator of [-1, 1]:
/// (max(0, s-1) + min(0, s+1)) / delta.
double beta_delta(double s, double delta);

/// Antiderivative of beta_delta vanishing on [-1, 1].
double beta_hat_delta(double s, double delta);

/// Half the squared distance from s to [-1, 1]; beta_hat_delta = obstacle_distance_penalty / delta.
double obstacle_distance_penalty(double s);

/// Derivative of the quartic double well (s^2 - 1)^2.
double quartic_prime(double s);
double quartic_well(double s);

// Pointwise bulk potential W(s) of the given law. For Obstacle the caller must
// ensure |s| <= 1; outside, the indicator is infinite.
double bulk_potential(const PotentialSpec& pot, double s);

/// Ginzburg-Landau energy (eps/2)(u, Ku) + (1/eps) * lumped integral of W(u).
/// Throws ConstraintViolationError for Obstacle when some |u_j| > 1 + 1e-12.
double discrete_energy(const GridSpec& g, const ScalarField& u, double eps, const PotentialSpec& pot);

}  // namespace chinpaint
