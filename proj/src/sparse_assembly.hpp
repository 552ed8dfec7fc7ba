#pragma once

#include <Eigen/SparseCore>
#include <vector>

#include "chinpaint/grid.hpp"

namespace chinpaint::detail {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

inline void append_stiffness(const StencilTable& st, std::vector<Triplet>& out, int row_offset,
                             int col_offset, double scale) {
  for (std::size_t k = 0; k < st.nodes.size(); ++k) {
    const auto& nd = st.nodes[k];
    const int r = row_offset + static_cast<int>(k);
    out.emplace_back(r, col_offset + static_cast<int>(k), scale * nd.diag);
    for (int e = 0; e < nd.count; ++e)
      out.emplace_back(r, col_offset + static_cast<int>(nd.nb[e]), -scale * nd.coupling[e]);
  }
}

inline SparseMatrix stiffness_matrix(const StencilTable& st) {
  const auto n = static_cast<Eigen::Index>(st.nodes.size());
  std::vector<Triplet> t;
  t.reserve(5 * st.nodes.size());
  append_stiffness(st, t, 0, 0, 1.0);
  SparseMatrix k(n, n);
  k.setFromTriplets(t.begin(), t.end());
  return k;
}

inline SparseMatrix diagonal_matrix(const std::vector<double>& d) {
  const auto n = static_cast<Eigen::Index>(d.size());
  SparseMatrix m(n, n);
  m.reserve(Eigen::VectorXi::Constant(n, 1));
  for (Eigen::Index k = 0; k < n; ++k) m.insert(k, k) = d[static_cast<std::size_t>(k)];
  m.makeCompressed();
  return m;
}

}  // namespace chinpaint::detail
