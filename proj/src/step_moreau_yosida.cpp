#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

#include "chinpaint/errors.hpp"
#include "chinpaint/step_solvers.hpp"
#include "reduced_step.hpp"

namespace chinpaint {

namespace {

std::vector<signed char> penalty_set(const std::vector<double>& u) {
  std::vector<signed char> s(u.size(), 0);
  for (std::size_t k = 0; k < u.size(); ++k) s[k] = u[k] > 1.0 ? 1 : (u[k] < -1.0 ? -1 : 0);
  return s;
}

}  // namespace

StepResult step_moreau_yosida(const StepProblem& p, double delta) {
  if (!(delta > 0.0)) throw InvalidParameterError("Moreau-Yosida delta must be positive");
  validate_step_problem(p, false);
  const GridSpec& g = p.grid;
  const std::size_t n = g.size();
  const StencilTable st = build_stencil(g);
  const detail::ReducedStep rs = detail::build_reduced_step(p, st);
  const double eps = p.eps;
  // Penalised rows gain (tau / (eps delta)) K w on the left and m (c - s) / (eps delta) on the right.
  const double pen = 1.0 / (eps * delta);

  detail::SparseMatrix a = rs.q;
  Eigen::SparseLU<detail::SparseMatrix> lu;
  lu.analyzePattern(a);
  const std::vector<double> ones(n, 1.0);
  std::vector<double> wk(n);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));

  StepResult r;
  r.u_next = ScalarField(g);
  r.w_next = ScalarField(g);
  std::vector<signed char> active = penalty_set(p.u_prev.values);
  const std::size_t cap = p.iteration_cap();
  bool repeated = false;
  std::size_t it = 0;
  while (it < cap && !repeated) {
    ++it;
    for (std::size_t k = 0; k < n; ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      wk[k] = active[k] ? pen : 0.0;
      rhs[i] = rs.b[i] + (active[k] ? pen * rs.mass[k] * (rs.c[i] - active[k]) : 0.0);
    }
    rs.blend(a, ones, wk);
    lu.factorize(a);
    if (lu.info() != Eigen::Success) throw Error("Moreau-Yosida step: sparse factorisation failed");
    const Eigen::VectorXd w = lu.solve(rhs);
    const Eigen::VectorXd u = rs.recover_u(w);
    for (std::size_t k = 0; k < n; ++k) {
      r.u_next[k] = u[static_cast<Eigen::Index>(k)];
      r.w_next[k] = w[static_cast<Eigen::Index>(k)];
    }
    std::vector<signed char> next = penalty_set(r.u_next.values);
    repeated = next == active;
    active = std::move(next);
  }

  // Residual of the penalised chemical potential equation, in units of w.
  std::vector<double> ku(n);
  stiffness_apply(g, r.u_next.values, ku);
  double res = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double m = st.nodes[k].mass;
    const double bk = eps * ku[k] + m * (beta_delta(r.u_next[k], delta) - p.u_prev[k]) / eps;
    res = std::max(res, std::abs(m * r.w_next[k] - bk) / m);
  }
  r.inner_iterations = it;
  r.final_residual = res;
  r.converged = repeated;
  for (double v : r.u_next.values) {
    if (v >= 1.0) ++r.active_upper;
    if (v <= -1.0) ++r.active_lower;
  }
  return r;
}

}  // namespace chinpaint
