#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <cstdio>
#include <optional>
#include <random>

#include "chinpaint/oracle/oracle.hpp"
#include "chinpaint/potentials.hpp"

namespace chinpaint::oracle {

Eigen::MatrixXd dense_stiffness(const GridSpec& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  auto add_triangle = [&](const std::array<std::size_t, 3>& nodes) {
    Eigen::Matrix<double, 3, 2> xy;
    for (int a = 0; a < 3; ++a) {
      xy(a, 0) = g.h * static_cast<double>(nodes[a] % g.nx);
      xy(a, 1) = g.h * static_cast<double>(nodes[a] / g.nx);
    }
    Eigen::Matrix2d jac;
    jac.col(0) = (xy.row(1) - xy.row(0)).transpose();
    jac.col(1) = (xy.row(2) - xy.row(0)).transpose();
    const double area = 0.5 * std::abs(jac.determinant());
    // Gradients of the reference basis (-1,-1), (1,0), (0,1) mapped by J^{-T}.
    Eigen::Matrix<double, 3, 2> ref;
    ref << -1, -1, 1, 0, 0, 1;
    const Eigen::Matrix<double, 3, 2> grad = ref * jac.inverse();
    const Eigen::Matrix3d ke = area * grad * grad.transpose();
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        k(static_cast<Eigen::Index>(nodes[a]), static_cast<Eigen::Index>(nodes[b])) += ke(a, b);
  };
  for (std::size_t j = 0; j + 1 < g.ny; ++j)
    for (std::size_t i = 0; i + 1 < g.nx; ++i) {
      const std::size_t p00 = j * g.nx + i, p10 = p00 + 1, p01 = p00 + g.nx, p11 = p01 + 1;
      add_triangle({p00, p10, p11});
      add_triangle({p00, p11, p01});
    }
  return k;
}

Eigen::VectorXd dense_lumped_mass(const GridSpec& g) {
  auto trapezoid = [&](std::size_t k, std::size_t n) { return (k == 0 || k == n - 1) ? g.h / 2 : g.h; };
  Eigen::VectorXd m(static_cast<Eigen::Index>(g.size()));
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i)
      m[static_cast<Eigen::Index>(j * g.nx + i)] = trapezoid(i, g.nx) * trapezoid(j, g.ny);
  return m;
}

DenseStepSystem assemble_dense(const StepProblem& p) {
  DenseStepSystem s;
  s.mass = dense_lumped_mass(p.grid);
  s.stiffness = dense_stiffness(p.grid);
  s.eps = p.eps;
  s.tau = p.tau;
  const auto n = s.mass.size();
  s.rhs_mass.resize(n);
  s.rhs_mu.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    const double up = p.u_prev[kk];
    s.rhs_mass[k] = s.mass[k] * (up / p.tau + p.fidelity.lambda[kk] * (p.image[kk] - up));
    s.rhs_mu[k] = s.mass[k] * up / p.eps;
  }
  return s;
}

namespace {

// state: -1 lower contact, 0 free, +1 upper contact.
struct Candidate {
  Eigen::VectorXd u, w, g;
};

std::optional<Candidate> solve_assignment(const DenseStepSystem& s, const std::vector<int>& state) {
  const auto n = s.mass.size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  Eigen::VectorXd b(2 * n);
  bool any_free = false;
  for (Eigen::Index j = 0; j < n; ++j) {
    a(j, j) = s.mass[j] / s.tau;
    a.block(j, n, 1, n) = s.stiffness.row(j);
    b[j] = s.rhs_mass[j];
    const int st = state[static_cast<std::size_t>(j)];
    if (st == 0) {
      any_free = true;
      a.block(n + j, 0, 1, n) = s.eps * s.stiffness.row(j);
      a(n + j, n + j) = -s.mass[j];
      b[n + j] = s.rhs_mu[j];
    } else {
      a(n + j, j) = 1.0;
      b[n + j] = st;
    }
  }
  Candidate c;
  Eigen::VectorXd x;
  if (any_free) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) return std::nullopt;
    x = lu.solve(b);
  } else {
    // u is fixed; w is determined up to a constant. Pick the minimum-norm w and
    // shift it below so that the contact signs hold if any shift can achieve it.
    x = a.completeOrthogonalDecomposition().solve(b);
    if ((a * x - b).norm() > 1e-9 * (1.0 + b.norm())) return std::nullopt;
  }
  c.u = x.head(n);
  c.w = x.tail(n);
  c.g = s.eps * (s.stiffness * c.u) - (s.mass.array() * c.w.array()).matrix() - s.rhs_mu;
  if (!any_free) {
    // g_j(shift) = g_j - m_j * shift; need g <= 0 on upper, g >= 0 on lower contacts.
    double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
      const double t = c.g[j] / s.mass[j];
      if (state[static_cast<std::size_t>(j)] > 0) lo = std::max(lo, t);
      else hi = std::min(hi, t);
    }
    const double shift = std::isfinite(lo) ? lo : (std::isfinite(hi) ? hi : 0.0);
    c.w.array() += shift;
    c.g -= shift * s.mass;
  }
  return c;
}

bool satisfies_kkt(const DenseStepSystem& s, const std::vector<int>& state, const Candidate& c) {
  const double feas_tol = 1e-11;
  const double sign_tol = 1e-11 * (1.0 + s.rhs_mu.cwiseAbs().maxCoeff() + s.rhs_mass.cwiseAbs().maxCoeff() * s.tau);
  for (Eigen::Index j = 0; j < c.u.size(); ++j) {
    const int st = state[static_cast<std::size_t>(j)];
    if (st == 0 && std::abs(c.u[j]) > 1.0 + feas_tol) return false;
    if (st > 0 && c.g[j] > sign_tol) return false;
    if (st < 0 && c.g[j] < -sign_tol) return false;
  }
  return true;
}

OracleSolution to_solution(const GridSpec& g, const Candidate& c, std::size_t solved, bool enumerated) {
  OracleSolution out;
  out.u = ScalarField(g, std::vector<double>(c.u.data(), c.u.data() + c.u.size()));
  out.w = ScalarField(g, std::vector<double>(c.w.data(), c.w.data() + c.w.size()));
  // Contacts are exact in the assignment; clean round-off on the free nodes.
  for (double& v : out.u.values) v = std::clamp(v, -1.0, 1.0);
  out.systems_solved = solved;
  out.enumerated = enumerated;
  return out;
}

}  // namespace

OracleSolution oracle_step_dense(const StepProblem& p, std::uint64_t seed, bool reverse_order) {
  validate_step_problem(p, true);
  const std::size_t n = p.grid.size();
  if (n > kOracleNodeCap) throw OracleFailure("oracle limited to " + std::to_string(kOracleNodeCap) + " nodes");
  const DenseStepSystem s = assemble_dense(p);
  std::size_t solved = 0;

  if (n <= kEnumerationLimit) {
    std::vector<int> state(n, -1);
    std::optional<Candidate> accepted;
    std::size_t total = 1;
    for (std::size_t k = 0; k < n; ++k) total *= 3;
    for (std::size_t step = 0; step < total; ++step) {
      std::size_t c = reverse_order ? total - 1 - step : step;
      for (std::size_t k = 0; k < n; ++k, c /= 3) state[k] = static_cast<int>(c % 3) - 1;
      auto cand = solve_assignment(s, state);
      ++solved;
      if (!cand || !satisfies_kkt(s, state, *cand)) continue;
      if (!accepted) {
        accepted = std::move(cand);
      } else if ((accepted->u - cand->u).cwiseAbs().maxCoeff() > 1e-8) {
        throw OracleFailure("two admissible active sets give different u");
      }
    }
    if (!accepted) throw OracleFailure("no admissible active set");
    return to_solution(p.grid, *accepted, solved, true);
  }

  // Primal-dual active set with restarts. The multiplier nu = -g is converted to
  // u units through the nodal block so it can be compared with u -/+ 1.
  Eigen::VectorXd scale(static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < scale.size(); ++j) {
    const double d = s.stiffness(j, j), m = s.mass[j];
    scale[j] = (d / m) / (m / s.tau + s.eps * d * d / m);
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(-1, 1);
  constexpr int kRestarts = 50;
  constexpr int kPdasIterations = 200;
  for (int attempt = 0; attempt <= kRestarts; ++attempt) {
    std::vector<int> state(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
      if (attempt == 0) state[k] = p.u_prev[k] >= 1.0 ? 1 : (p.u_prev[k] <= -1.0 ? -1 : 0);
      else state[k] = pick(rng);
    }
    for (int it = 0; it < kPdasIterations; ++it) {
      auto cand = solve_assignment(s, state);
      ++solved;
      if (!cand) break;
      std::vector<int> next(n, 0);
      for (std::size_t k = 0; k < n; ++k) {
        const auto j = static_cast<Eigen::Index>(k);
        const double nu = -cand->g[j] * scale[j];
        if (nu + (cand->u[j] - 1.0) > 0.0) next[k] = 1;
        else if (nu + (cand->u[j] + 1.0) < 0.0) next[k] = -1;
      }
      if (next == state) {
        if (satisfies_kkt(s, state, *cand)) return to_solution(p.grid, *cand, solved, false);
        break;
      }
      state = std::move(next);
    }
  }
  throw OracleFailure("primal-dual active set did not reach a KKT point");
}

double check_stationarity(const ScalarField& u, const ScalarField& image, const FidelityField& fid) {
  const GridSpec& g = u.grid;
  require_same_grid(g, image, "check_stationarity");
  if (fid.lambda.size() != g.size()) throw ShapeError("check_stationarity: fidelity size mismatch");
  const Eigen::VectorXd m = dense_lumped_mass(g);
  double defect = 0.0, measure = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!(fid.lambda[k] > 0.0)) continue;
    defect += m[static_cast<Eigen::Index>(k)] * (image[k] - u[k]);
    measure += m[static_cast<Eigen::Index>(k)];
  }
  if (measure == 0.0) throw InvalidInputError("check_stationarity: undamaged region is empty");
  return std::abs(defect) / measure;
}

double energy_gradient_check(const GridSpec& g, const ScalarField& u, double eps, double delta) {
  require_same_grid(g, u, "energy_gradient_check");
  const PotentialSpec pot = PotentialSpec::moreau_yosida(delta);
  const Eigen::MatrixXd k = dense_stiffness(g);
  const Eigen::VectorXd m = dense_lumped_mass(g);
  const Eigen::Map<const Eigen::VectorXd> uv(u.values.data(), static_cast<Eigen::Index>(u.size()));
  const Eigen::VectorXd ku = k * uv;
  constexpr double step = 1e-6, kink_window = 1e-3;

  ScalarField probe = u;
  auto energy_at = [&](std::size_t j, double value) {
    probe[j] = value;
    const double e = discrete_energy(g, probe, eps, pot);
    probe[j] = u[j];
    return e;
  };
  double worst = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double analytic = eps * ku[jj] + m[jj] / eps * (beta_delta(u[j], delta) - u[j]);
    const double s = u[j];
    double fd;
    if (std::abs(std::abs(s) - 1.0) < kink_window) {
      // Stay on the side of the kink the node is on.
      const double dir = (std::abs(s) >= 1.0) == (s > 0.0) ? 1.0 : -1.0;
      fd = dir * (energy_at(j, s + dir * step) - energy_at(j, s)) / step;
    } else {
      fd = (energy_at(j, s + step) - energy_at(j, s - step)) / (2.0 * step);
    }
    worst = std::max(worst, std::abs(analytic - fd));
  }
  return worst;
}

namespace {

void log_line(std::string& text, bool ok, const std::string& name, double value, const char* op, double bound) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s  %-52s %.3e %s %.3e\n", ok ? "PASS" : "FAIL", name.c_str(), value, op, bound);
  text += buf;
}

}  // namespace

bool VerificationReport::check(const std::string& name, double value, double bound) {
  const bool ok = value <= bound;
  log_line(text_, ok, name, value, "<=", bound);
  if (!ok) ++failures_;
  return ok;
}

bool VerificationReport::record(const std::string& name, bool ok, const std::string& detail) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s  %-52s %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  text_ += buf;
  if (!ok) ++failures_;
  return ok;
}

bool VerificationReport::check_at_least(const std::string& name, double value, double bound) {
  const bool ok = value >= bound;
  log_line(text_, ok, name, value, ">=", bound);
  if (!ok) ++failures_;
  return ok;
}

}  // namespace chinpaint::oracle
