#pragma once

#include <Eigen/SparseCore>
#include <vector>

#include "chinpaint/step_solvers.hpp"
#include "sparse_assembly.hpp"

namespace chinpaint::detail {

// The step with u eliminated through the mass equation, u = c - tau M^{-1} K w.
// Free nodes then read  Q w = b  with  Q = M + eps tau K M^{-1} K,  b = eps K c - M up / eps,
// and the residual of that row is exactly g_j.
struct ReducedStep {
  std::vector<double> mass;
  SparseMatrix k;         // stiffness
  SparseMatrix q;         // M + eps tau K M^{-1} K
  SparseMatrix tau_k;     // tau K stored on the pattern of q
  Eigen::VectorXd c;      // up + tau lambda (I - up)
  Eigen::VectorXd b;      // eps K c - M up / eps
  double tau = 0.0;

  Eigen::VectorXd recover_u(const Eigen::VectorXd& w) const;
  // Row-wise blend into out (pattern of q): out_row = wq[row] * q_row + wk[row] * tau_k_row.
  void blend(SparseMatrix& out, const std::vector<double>& wq, const std::vector<double>& wk) const;
};

ReducedStep build_reduced_step(const StepProblem& p, const StencilTable& st);

// g_j = eps (K u)_j - m_j (w_j + up_j / eps)
std::vector<double> complementarity_residual(const StepProblem& p, const std::vector<double>& u,
                                             const std::vector<double>& w);

}  // namespace chinpaint::detail

namespace chinpaint::detail {

// Projected Gauss-Seidel from an explicit starting pair (either may be null).
StepResult gauss_seidel_from(const StepProblem& p, const ScalarField* u0, const ScalarField* w0);

}  // namespace chinpaint::detail
