#include <algorithm>
#include <cmath>

#include "chinpaint/step_solvers.hpp"

namespace chinpaint {

double KKTReport::worst() const {
  return std::max({max_interior_residual, max_sign_violation_upper, max_sign_violation_lower});
}

KKTReport kkt_residual(const GridSpec& g, const StepResult& r, const StepProblem& p) {
  require_same_grid(g, r.u_next, "kkt_residual: u");
  require_same_grid(g, r.w_next, "kkt_residual: w");
  require_same_grid(g, p.u_prev, "kkt_residual: u_prev");
  std::vector<double> ku(g.size());
  stiffness_apply(g, r.u_next.values, ku);
  KKTReport rep;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double u = r.u_next[k];
    const double gk = p.eps * ku[k] - g.weight(k) * (r.w_next[k] + p.u_prev[k] / p.eps);
    if (u >= 1.0)
      rep.max_sign_violation_upper = std::max(rep.max_sign_violation_upper, std::max(0.0, gk));
    else if (u <= -1.0)
      rep.max_sign_violation_lower = std::max(rep.max_sign_violation_lower, std::max(0.0, -gk));
    else
      rep.max_interior_residual = std::max(rep.max_interior_residual, std::abs(gk));
  }
  return rep;
}

double mass_fidelity_defect(const StepProblem& p, const ScalarField& u_next) {
  const GridSpec& g = p.grid;
  require_same_grid(g, u_next, "mass_fidelity_defect");
  double change = 0.0, source = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double m = g.weight(k);
    change += m * (u_next[k] - p.u_prev[k]);
    source += m * p.fidelity.lambda[k] * (p.image[k] - p.u_prev[k]);
  }
  return std::abs(change - p.tau * source) / g.area();
}

}  // namespace chinpaint
