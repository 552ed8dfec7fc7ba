#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>

#include "chinpaint/errors.hpp"
#include "chinpaint/step_solvers.hpp"
#include "reduced_step.hpp"

namespace chinpaint {

namespace {

using detail::SparseMatrix;

// Contact state per node: -1 lower, 0 free, +1 upper.
using ContactSet = std::vector<signed char>;

// All nodes in contact: K w = M (c - s) / tau fixes w up to a constant only. Pin
// w at node 0, then shift the constant so the contact signs hold where possible.
// Returns sum m (c - s): the mass the contact values fail to carry.
double solve_fully_constrained(const detail::ReducedStep& rs, const ContactSet& s, Eigen::VectorXd& w) {
  const auto n = static_cast<Eigen::Index>(rs.mass.size());
  SparseMatrix a = rs.tau_k;
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) rhs[i] = rs.mass[static_cast<std::size_t>(i)] * (rs.c[i] - s[static_cast<std::size_t>(i)]);
  for (Eigen::Index col = 0; col < n; ++col)
    for (SparseMatrix::InnerIterator it(a, col); it; ++it)
      if (it.row() == 0) it.valueRef() = col == 0 ? rs.tau_k.coeff(0, 0) : 0.0;
  double imbalance = 0.0, total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    imbalance += rhs[i];
    total += rs.mass[static_cast<std::size_t>(i)];
  }
  rhs[0] = 0.0;
  Eigen::SparseLU<SparseMatrix> lu(a);
  if (lu.info() != Eigen::Success) throw Error("active set step: pinned system is singular");
  w = lu.solve(rhs);
  return std::abs(imbalance) <= 1e-13 * total ? 0.0 : imbalance;
}

void shift_to_contact_signs(const ContactSet& s, const std::vector<double>& mass, Eigen::VectorXd& w,
                            std::vector<double>& g) {
  double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double t = g[k] / mass[k];
    if (s[k] > 0) lo = std::max(lo, t);
    else hi = std::min(hi, t);
  }
  const double shift = std::isfinite(lo) ? lo : (std::isfinite(hi) ? hi : 0.0);
  w.array() += shift;
  for (std::size_t k = 0; k < s.size(); ++k) g[k] -= shift * mass[k];
}

void count_contacts(StepResult& r) {
  r.active_upper = r.active_lower = 0;
  for (double v : r.u_next.values) {
    if (v >= 1.0) ++r.active_upper;
    if (v <= -1.0) ++r.active_lower;
  }
}

}  // namespace

StepResult step_obstacle_active_set(const StepProblem& p) {
  validate_step_problem(p, true);
  const GridSpec& g = p.grid;
  const std::size_t n = g.size();
  const StencilTable st = build_stencil(g);
  const detail::ReducedStep rs = detail::build_reduced_step(p, st);
  const double release_tol = 0.1 * p.inner_tol;  // g units
  const double overshoot_tol = 0.1 * p.inner_tol;  // u units

  ContactSet state(n, 0);
  for (std::size_t k = 0; k < n; ++k) state[k] = p.u_prev[k] >= 1.0 ? 1 : (p.u_prev[k] <= -1.0 ? -1 : 0);

  SparseMatrix a = rs.q;
  Eigen::SparseLU<SparseMatrix> lu;
  lu.analyzePattern(a);
  std::vector<double> wq(n), wk(n);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(n)), w;
  std::vector<double> u(n), gres;

  StepResult r;
  const std::size_t cap = std::min(p.iteration_cap(), kMaxActiveSetIterations);
  bool repeated = false, mass_carried = true;
  double imbalance = 0.0;
  std::size_t it = 0;
  while (it < cap && !repeated) {
    ++it;
    const bool any_free = std::find(state.begin(), state.end(), 0) != state.end();
    if (any_free) {
      for (std::size_t k = 0; k < n; ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        const bool contact = state[k] != 0;
        wq[k] = contact ? 0.0 : 1.0;
        wk[k] = contact ? 1.0 : 0.0;
        rhs[i] = contact ? rs.mass[k] * (rs.c[i] - state[k]) : rs.b[i];
      }
      rs.blend(a, wq, wk);
      lu.factorize(a);
      if (lu.info() != Eigen::Success) break;
      w = lu.solve(rhs);
    } else {
      imbalance = solve_fully_constrained(rs, state, w);
    }
    const Eigen::VectorXd uv = rs.recover_u(w);
    for (std::size_t k = 0; k < n; ++k) u[k] = state[k] != 0 ? state[k] : uv[static_cast<Eigen::Index>(k)];
    gres = detail::complementarity_residual(p, u, std::vector<double>(w.data(), w.data() + w.size()));
    if (!any_free) shift_to_contact_signs(state, rs.mass, w, gres);

    ContactSet next(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
      if (state[k] > 0) next[k] = gres[k] <= release_tol ? 1 : 0;
      else if (state[k] < 0) next[k] = gres[k] >= -release_tol ? -1 : 0;
      else next[k] = u[k] > 1.0 + overshoot_tol ? 1 : (u[k] < -1.0 - overshoot_tol ? -1 : 0);
    }
    if (!any_free && imbalance != 0.0) {
      // Too little mass frees the loosest lower contact, too much the loosest upper one.
      const signed char side = imbalance > 0.0 ? -1 : 1;
      std::size_t pick = n;
      for (std::size_t k = 0; k < n; ++k)
        if (state[k] == side && (pick == n || side * gres[k] / rs.mass[k] > side * gres[pick] / rs.mass[pick])) pick = k;
      if (pick == n) {
        mass_carried = false;
        repeated = true;
        break;
      }
      next = state;
      next[pick] = 0;
    }
    repeated = next == state;
    if (!repeated) state = std::move(next);
  }

  if (!repeated || w.size() == 0) {
    // Cycling or a singular contact set: continue from the last iterate with the
    // nodal solver, which is slower but cannot cycle.
    ScalarField u0(g), w0(g);
    const bool have_iterate = w.size() == static_cast<Eigen::Index>(n);
    for (std::size_t k = 0; k < n; ++k) {
      u0[k] = have_iterate ? std::clamp(u[k], -1.0, 1.0) : p.u_prev[k];
      w0[k] = have_iterate ? w[static_cast<Eigen::Index>(k)] : 0.0;
    }
    StepResult gs = detail::gauss_seidel_from(p, &u0, have_iterate ? &w0 : nullptr);
    gs.inner_iterations += it;
    return gs;
  }

  r.u_next = ScalarField(g);
  r.w_next = ScalarField(g);
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    r.u_next[k] = std::clamp(u[k], -1.0, 1.0);
    r.w_next[k] = w[static_cast<Eigen::Index>(k)];
    const double gk = gres[k];
    worst = std::max(worst, state[k] > 0 ? std::max(0.0, gk) : state[k] < 0 ? std::max(0.0, -gk) : std::abs(gk));
  }
  r.inner_iterations = it;
  r.final_residual = worst;
  // A full contact set that cannot carry the source mass means the step has no solution.
  r.converged = mass_carried;
  count_contacts(r);
  return r;
}

}  // namespace chinpaint
