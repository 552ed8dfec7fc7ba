#include <Eigen/IterativeLinearSolvers>
#include <cmath>

#include "chinpaint/errors.hpp"
#include "chinpaint/step_solvers.hpp"
#include "sparse_assembly.hpp"

namespace chinpaint {

StepResult step_quartic(const StepProblem& p) {
  validate_step_problem(p, false);
  const GridSpec& g = p.grid;
  const std::size_t n = g.size();
  const StencilTable st = build_stencil(g);
  const double eps = p.eps, tau = p.tau;

  std::vector<double> mass(n), inv_mass(n), implicit_coef(n);
  for (std::size_t k = 0; k < n; ++k) {
    mass[k] = st.nodes[k].mass;
    inv_mass[k] = 1.0 / mass[k];
    implicit_coef[k] = 4.0 / eps * mass[k] * p.u_prev[k] * p.u_prev[k];
  }
  const detail::SparseMatrix k_mat = detail::stiffness_matrix(st);
  const detail::SparseMatrix m_mat = detail::diagonal_matrix(mass);
  const detail::SparseMatrix m_inv = detail::diagonal_matrix(inv_mass);
  // Operator of the chemical potential equation acting on u.
  const detail::SparseMatrix b_op = eps * k_mat + detail::diagonal_matrix(implicit_coef);
  const detail::SparseMatrix k_scaled = m_inv * k_mat;
  detail::SparseMatrix q = b_op * k_scaled;
  q *= tau;
  q += m_mat;
  q.makeCompressed();

  // Explicit part of the update: u = c - tau M^{-1} K w.
  Eigen::VectorXd c(static_cast<Eigen::Index>(n));
  Eigen::VectorXd explicit_rhs(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    const double up = p.u_prev[k];
    c[i] = up + tau * p.fidelity.lambda[k] * (p.image[k] - up);
    explicit_rhs[i] = 4.0 / eps * mass[k] * up;
  }
  const Eigen::VectorXd rhs = b_op * c - explicit_rhs;

  Eigen::BiCGSTAB<detail::SparseMatrix, Eigen::IncompleteLUT<double>> solver;
  solver.setTolerance(p.inner_tol);
  solver.setMaxIterations(static_cast<Eigen::Index>(p.iteration_cap()));
  solver.compute(q);
  if (solver.info() != Eigen::Success) throw Error("quartic step: preconditioner setup failed");

  Eigen::VectorXd w0(static_cast<Eigen::Index>(n));
  if (p.w_guess) {
    for (std::size_t k = 0; k < n; ++k) w0[static_cast<Eigen::Index>(k)] = (*p.w_guess)[k];
  } else {
    w0.setZero();
  }
  const Eigen::VectorXd w = solver.solveWithGuess(rhs, w0);
  const Eigen::VectorXd u = c - tau * (k_scaled * w);

  StepResult r;
  r.u_next = ScalarField(g);
  r.w_next = ScalarField(g);
  for (std::size_t k = 0; k < n; ++k) {
    r.u_next[k] = u[static_cast<Eigen::Index>(k)];
    r.w_next[k] = w[static_cast<Eigen::Index>(k)];
    if (r.u_next[k] >= 1.0) ++r.active_upper;
    if (r.u_next[k] <= -1.0) ++r.active_lower;
  }
  r.inner_iterations = static_cast<std::size_t>(solver.iterations());
  r.final_residual = solver.error();
  r.converged = solver.info() == Eigen::Success;
  return r;
}

}  // namespace chinpaint
