#include "chinpaint/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chinpaint/errors.hpp"

namespace chinpaint {

namespace {

void require_delta(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw InvalidParameterError("Moreau-Yosida parameter delta must be positive, got " +
                                std::to_string(delta));
}

constexpr double kObstacleSlack = 1e-12;

}  // namespace

PotentialSpec PotentialSpec::moreau_yosida(double delta) {
  require_delta(delta);
  return {PotentialKind::MoreauYosida, delta};
}

std::string_view to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::Obstacle: return "obstacle";
    case PotentialKind::MoreauYosida: return "my";
    case PotentialKind::Quartic: return "quartic";
  }
  return "unknown";
}

double beta_delta(double s, double delta) {
  require_delta(delta);
  return (std::max(0.0, s - 1.0) + std::min(0.0, s + 1.0)) / delta;
}

double obstacle_distance_penalty(double s) {
  if (s >= 1.0) return 0.5 * (s - 1.0) * (s - 1.0);
  if (s <= -1.0) return 0.5 * (s + 1.0) * (s + 1.0);
  return 0.0;
}

double beta_hat_delta(double s, double delta) {
  require_delta(delta);
  return obstacle_distance_penalty(s) / delta;
}

double quartic_prime(double s) { return 4.0 * s * (s * s - 1.0); }

double quartic_well(double s) {
  const double t = s * s - 1.0;
  return t * t;
}

double bulk_potential(const PotentialSpec& pot, double s) {
  switch (pot.kind) {
    case PotentialKind::Obstacle: return 0.5 * (1.0 - s * s);
    case PotentialKind::MoreauYosida: return beta_hat_delta(s, pot.delta) + 0.5 * (1.0 - s * s);
    case PotentialKind::Quartic: return quartic_well(s);
  }
  return 0.0;
}

double discrete_energy(const GridSpec& g, const ScalarField& u, double eps, const PotentialSpec& pot) {
  require_same_grid(g, u, "discrete_energy");
  if (!(eps > 0.0)) throw InvalidParameterError("eps must be positive");
  if (pot.kind == PotentialKind::Obstacle) {
    for (std::size_t k = 0; k < u.size(); ++k)
      if (std::abs(u[k]) > 1.0 + kObstacleSlack)
        throw ConstraintViolationError("obstacle energy undefined: |u| = " + std::to_string(std::abs(u[k])) +
                                       " at node " + std::to_string(k));
  }
  std::vector<double> ku(g.size());
  stiffness_apply(g, u.values, ku);
  double gradient = 0.0;
  double bulk = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    gradient += u[k] * ku[k];
    bulk += g.weight(k) * bulk_potential(pot, u[k]);
  }
  return 0.5 * eps * gradient + bulk / eps;
}

}  // namespace chinpaint
