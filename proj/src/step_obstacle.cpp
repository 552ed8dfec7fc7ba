#include <algorithm>
#include <cmath>
#include <string>

#include "chinpaint/errors.hpp"
#include "chinpaint/step_solvers.hpp"

namespace chinpaint {

namespace {

constexpr double kFeasibilitySlack = 1e-12;

void count_contacts(StepResult& r) {
  r.active_upper = 0;
  r.active_lower = 0;
  for (double v : r.u_next.values) {
    if (v >= 1.0) ++r.active_upper;
    if (v <= -1.0) ++r.active_lower;
  }
}

}  // namespace

void validate_step_problem(const StepProblem& p, bool require_feasible) {
  const GridSpec& g = p.grid;
  require_same_grid(g, p.u_prev, "step: u_prev");
  require_same_grid(g, p.image, "step: image");
  if (!(p.fidelity.grid == g) || p.fidelity.lambda.size() != g.size())
    throw ShapeError("step: fidelity field does not live on the grid");
  if (p.w_guess) require_same_grid(g, *p.w_guess, "step: w_guess");
  if (!(p.eps > 0.0) || !(p.tau > 0.0) || !(p.inner_tol > 0.0))
    throw InvalidParameterError("step: eps, tau and inner_tol must be positive");
  if (require_feasible) {
    for (std::size_t k = 0; k < g.size(); ++k)
      if (!(std::abs(p.u_prev[k]) <= 1.0 + kFeasibilitySlack))
        throw ConstraintViolationError("step: u_prev = " + std::to_string(p.u_prev[k]) + " at node " +
                                       std::to_string(k) + " violates |u| <= 1");
  }
}

namespace detail {

StepResult gauss_seidel_from(const StepProblem& p, const ScalarField* u0, const ScalarField* w0) {
  const GridSpec& g = p.grid;
  const std::size_t n = g.size();
  const StencilTable st = build_stencil(g);
  const double eps = p.eps, tau = p.tau;

  // Per-node constants of the 2x2 block.
  std::vector<double> rhs_mass(n), rhs_mu(n), coef(n), to_u_units(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& nd = st.nodes[k];
    const double up = std::clamp(p.u_prev[k], -1.0, 1.0);
    rhs_mass[k] = nd.mass * (up / tau + p.fidelity.lambda[k] * (p.image[k] - up));
    rhs_mu[k] = -nd.mass * up / eps;
    coef[k] = nd.mass / tau + eps * nd.diag * nd.diag / nd.mass;
    to_u_units[k] = tau * nd.diag / nd.mass;
  }

  StepResult r;
  r.u_next = ScalarField(g);
  const ScalarField& start = u0 ? *u0 : p.u_prev;
  for (std::size_t k = 0; k < n; ++k) r.u_next[k] = std::clamp(start[k], -1.0, 1.0);
  if (w0) {
    r.w_next = *w0;
  } else if (p.w_guess) {
    r.w_next = *p.w_guess;
  } else {
    // Chemical potential of the unconstrained equation at u = u_prev.
    r.w_next = ScalarField(g);
    std::vector<double> ku(n);
    stiffness_apply(g, r.u_next.values, ku);
    for (std::size_t k = 0; k < n; ++k) r.w_next[k] = eps * ku[k] / st.nodes[k].mass - r.u_next[k] / eps;
  }

  double* u = r.u_next.values.data();
  double* w = r.w_next.values.data();
  const std::size_t cap = p.iteration_cap();
  double change = 0.0;
  std::size_t sweep = 0;
  while (sweep < cap) {
    ++sweep;
    change = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const auto& nd = st.nodes[k];
      double off_w = 0.0, off_u = 0.0;  // sum over k' != k of K_kk' w_k', K_kk' u_k'
      for (int e = 0; e < nd.count; ++e) {
        off_w -= nd.coupling[e] * w[nd.nb[e]];
        off_u -= nd.coupling[e] * u[nd.nb[e]];
      }
      const double a = rhs_mass[k] - off_w;
      const double b = eps * off_u + rhs_mu[k];
      // m w = eps d u + b + nu, nu in N(u); substitute into m u / tau + d w = a.
      const double free_u = (a - nd.diag * b / nd.mass) / coef[k];
      const double u_new = std::clamp(free_u, -1.0, 1.0);
      const double w_new = (a - nd.mass * u_new / tau) / nd.diag;
      change = std::max(change, std::abs(u_new - u[k]));
      change = std::max(change, to_u_units[k] * std::abs(w_new - w[k]));
      u[k] = u_new;
      w[k] = w_new;
    }
    if (change < p.inner_tol) break;
  }
  // Row residuals left by the last sweep leak into the mass balance. Since K has zero
  // column sums the balance depends on u only, so restore it on the free nodes.
  for (int pass = 0; pass < 4; ++pass) {
    double defect = 0.0, free_mass = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double up = std::clamp(p.u_prev[k], -1.0, 1.0);
      defect += st.nodes[k].mass * (u[k] - up) - tau * (rhs_mass[k] - st.nodes[k].mass * up / tau);
      if (std::abs(u[k]) < 1.0) free_mass += st.nodes[k].mass;
    }
    if (free_mass == 0.0 || defect == 0.0) break;
    const double shift = -defect / free_mass;
    for (std::size_t k = 0; k < n; ++k)
      if (std::abs(u[k]) < 1.0) u[k] = std::clamp(u[k] + shift, -1.0, 1.0);
  }
  r.inner_iterations = sweep;
  r.final_residual = change;
  r.converged = change < p.inner_tol;
  count_contacts(r);
  return r;
}

}  // namespace detail

StepResult step_obstacle_gauss_seidel(const StepProblem& p) {
  validate_step_problem(p, true);
  return detail::gauss_seidel_from(p, nullptr, nullptr);
}

StepResult step_obstacle(const StepProblem& p) {
  switch (p.obstacle_method) {
    case ObstacleMethod::ActiveSet: return step_obstacle_active_set(p);
    case ObstacleMethod::BlockGaussSeidel: return step_obstacle_gauss_seidel(p);
  }
  throw InvalidParameterError("unknown obstacle method");
}

StepResult step(const StepProblem& p, const PotentialSpec& pot) {
  switch (pot.kind) {
    case PotentialKind::Obstacle: return step_obstacle(p);
    case PotentialKind::MoreauYosida: return step_moreau_yosida(p, pot.delta);
    case PotentialKind::Quartic: return step_quartic(p);
  }
  throw InvalidParameterError("unknown potential kind");
}

}  // namespace chinpaint
