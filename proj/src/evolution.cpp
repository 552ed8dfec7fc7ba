#include "chinpaint/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "chinpaint/errors.hpp"

namespace chinpaint {

void StageParams::validate() const {
  if (!(eps > 0.0) || !(alpha > 0.0) || !(tau > 0.0) || !(stop_tol > 0.0) || !(inner_tol > 0.0))
    throw InvalidParameterError("stage parameters eps, alpha, tau, stop_tol, inner_tol must be positive");
  if (max_steps < 1) throw InvalidParameterError("stage needs max_steps >= 1");
}

ScalarField initial_field(const ScalarField& image, const std::vector<bool>& damaged) {
  if (damaged.size() != image.size()) throw ShapeError("initial_field: mask size mismatch");
  ScalarField u0 = image;
  for (std::size_t k = 0; k < u0.size(); ++k)
    if (damaged[k]) u0[k] = 0.0;
  return u0;
}

StageRun run_stage(const ScalarField& u0, const ScalarField& image, const FidelityField& mask,
                   const StageParams& stage, const PotentialSpec& pot, const ScalarField* w0,
                   const StepObserver& observer) {
  stage.validate();
  const GridSpec& g = u0.grid;
  require_same_grid(g, image, "run_stage: image");

  if (!(mask.grid == g) || mask.lambda.size() != g.size()) throw ShapeError("run_stage: mask does not live on the grid");

  StepProblem p;
  p.grid = g;
  p.u_prev = u0;
  p.image = image;
  for (double& v : p.image.values) v = std::clamp(v, -1.0, 1.0);
  // Keep the damage pattern, rescale to this stage's weight. An all-zero mask
  // (pure Cahn-Hilliard) passes through unchanged.
  p.fidelity = mask;
  p.fidelity.alpha = stage.alpha;
  for (double& l : p.fidelity.lambda) l = l > 0.0 ? stage.alpha : 0.0;
  p.eps = stage.eps;
  p.tau = stage.tau;
  p.inner_tol = stage.inner_tol;
  p.max_inner_iters = stage.max_inner_iters;
  if (w0) p.w_guess = *w0;

  StageRun out;
  RunReport& rep = out.report;
  const std::vector<double> weights = g.lumped_weights();
  for (double v : u0.values) rep.max_abs_u = std::max(rep.max_abs_u, std::abs(v));
  rep.energy_initial = discrete_energy(g, u0, stage.eps, pot);

  StepResult r;
  for (std::size_t n = 1; n <= stage.max_steps; ++n) {
    r = step(p, pot);
    if (!r.converged) ++rep.unconverged_steps;
    rep.total_inner_iterations += r.inner_iterations;
    rep.max_mass_defect = std::max(rep.max_mass_defect, mass_fidelity_defect(p, r.u_next));

    double change = 0.0, mass = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double d = r.u_next[k] - p.u_prev[k];
      change += weights[k] * d * d;
      mass += weights[k] * r.u_next[k];
      rep.max_abs_u = std::max(rep.max_abs_u, std::abs(r.u_next[k]));
    }
    rep.steps_taken = n;
    rep.stop_value_final = change;
    rep.stop_trace.push_back(change);
    rep.energy_trace.push_back(discrete_energy(g, r.u_next, stage.eps, pot));
    rep.mass_trace.push_back(mass);
    if (observer) observer(n, p, r);

    p.u_prev = std::move(r.u_next);
    p.w_guess = std::move(r.w_next);
    if (change <= stage.stop_tol) break;
    if (n == stage.max_steps) rep.hit_max_steps = true;
  }
  out.u = std::move(p.u_prev);
  out.w = std::move(*p.w_guess);
  return out;
}

TwoStageRun run_two_stage(const ScalarField& u0, const ScalarField& image, const std::vector<bool>& damaged,
                          const TwoStageConfig& params, const StepObserver& observer) {
  const GridSpec& g = u0.grid;
  const FidelityField mask1 = make_fidelity(g, damaged, params.stage1.alpha);
  StageRun first = run_stage(u0, image, mask1, params.stage1, params.potential, nullptr, observer);
  const FidelityField mask2 = make_fidelity(g, damaged, params.stage2.alpha);
  StageRun second = run_stage(first.u, image, mask2, params.stage2, params.potential, &first.w, observer);
  return {std::move(second.u), std::move(first.report), std::move(second.report)};
}

void write_trace(std::ostream& os, const RunReport& report) {
  const auto old_precision = os.precision(12);
  for (std::size_t n = 0; n < report.steps_taken; ++n)
    os << (n + 1) << '\t' << report.stop_trace[n] << '\t' << report.energy_trace[n] << '\t'
       << report.mass_trace[n] << '\n';
  os.precision(old_precision);
}

}  // namespace chinpaint
