#include "reduced_step.hpp"

#include <stdexcept>

namespace chinpaint::detail {

ReducedStep build_reduced_step(const StepProblem& p, const StencilTable& st) {
  const std::size_t n = st.nodes.size();
  const auto ni = static_cast<Eigen::Index>(n);
  ReducedStep rs;
  rs.tau = p.tau;
  rs.mass.resize(n);
  std::vector<double> inv_mass(n);
  for (std::size_t k = 0; k < n; ++k) {
    rs.mass[k] = st.nodes[k].mass;
    inv_mass[k] = 1.0 / rs.mass[k];
  }
  rs.k = stiffness_matrix(st);
  rs.k.makeCompressed();
  SparseMatrix q = rs.k * diagonal_matrix(inv_mass) * rs.k;
  q *= p.eps * p.tau;
  q += diagonal_matrix(rs.mass);
  q.makeCompressed();
  rs.q = q;
  // 0 * q keeps the pattern, so the sum lands on the same structure.
  SparseMatrix tk = 0.0 * q + p.tau * rs.k;
  tk.makeCompressed();
  if (tk.nonZeros() != q.nonZeros() ||
      !std::equal(q.innerIndexPtr(), q.innerIndexPtr() + q.nonZeros(), tk.innerIndexPtr()))
    throw std::logic_error("reduced step: stiffness pattern is not contained in the pattern of Q");
  rs.tau_k = std::move(tk);

  rs.c.resize(ni);
  Eigen::VectorXd mup(ni);
  for (std::size_t k = 0; k < n; ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    const double up = p.u_prev[k];
    rs.c[i] = up + p.tau * p.fidelity.lambda[k] * (p.image[k] - up);
    mup[i] = rs.mass[k] * up / p.eps;
  }
  rs.b = p.eps * (rs.k * rs.c) - mup;
  return rs;
}

Eigen::VectorXd ReducedStep::recover_u(const Eigen::VectorXd& w) const {
  Eigen::VectorXd kw = k * w;
  for (Eigen::Index i = 0; i < kw.size(); ++i) kw[i] /= mass[static_cast<std::size_t>(i)];
  return c - tau * kw;
}

void ReducedStep::blend(SparseMatrix& out, const std::vector<double>& wq, const std::vector<double>& wk) const {
  if (out.nonZeros() != q.nonZeros()) out = q;
  const int* rows = q.innerIndexPtr();
  const double* qv = q.valuePtr();
  const double* kv = tau_k.valuePtr();
  double* ov = out.valuePtr();
  for (Eigen::Index i = 0; i < q.nonZeros(); ++i) {
    const auto r = static_cast<std::size_t>(rows[i]);
    ov[i] = wq[r] * qv[i] + wk[r] * kv[i];
  }
}

std::vector<double> complementarity_residual(const StepProblem& p, const std::vector<double>& u,
                                             const std::vector<double>& w) {
  const GridSpec& g = p.grid;
  std::vector<double> ku(g.size());
  stiffness_apply(g, u, ku);
  for (std::size_t k = 0; k < g.size(); ++k) ku[k] = p.eps * ku[k] - g.weight(k) * (w[k] + p.u_prev[k] / p.eps);
  return ku;
}

}  // namespace chinpaint::detail
