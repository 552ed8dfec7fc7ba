#pragma once

#include <cstddef>
#include <optional>

#include "chinpaint/grid.hpp"
#include "chinpaint/potentials.hpp"

namespace chinpaint {

inline constexpr double kDefaultInnerTol = 1e-9;

enum class ObstacleMethod { ActiveSet, BlockGaussSeidel };

// One time step of the lumped scheme
//   m_j (u_j - up_j) / tau + (K w)_j = m_j lambda_j (I_j - up_j)
//   g_j := eps (K u)_j - m_j (w_j + up_j / eps),  g_j (z - u_j) >= 0 for all z in [-1, 1]
// with the fidelity source and the concave -u/eps part taken at the previous level.
struct StepProblem {
  GridSpec grid;
  ScalarField u_prev;
  ScalarField image;      // I, values in [-1, 1]
  FidelityField fidelity;
  double eps = 0.0;
  double tau = 0.0;
  double inner_tol = kDefaultInnerTol;
  std::size_t max_inner_iters = 0;  // 0 selects 10 * node count
  std::optional<ScalarField> w_guess;  // warm start for the chemical potential
  ObstacleMethod obstacle_method = ObstacleMethod::ActiveSet;

  std::size_t iteration_cap() const { return max_inner_iters ? max_inner_iters : 10 * grid.size(); }
};

struct StepResult {
  ScalarField u_next;
  ScalarField w_next;
  std::size_t inner_iterations = 0;
  double final_residual = 0.0;
  std::size_t active_upper = 0;  // nodes with u >= 1
  std::size_t active_lower = 0;  // nodes with u <= -1
  bool converged = false;        // false when the iteration cap was hit
};

struct KKTReport {
  double max_interior_residual = 0.0;     // |g_j| over |u_j| < 1
  double max_sign_violation_upper = 0.0;  // max(0, g_j) over u_j = 1
  double max_sign_violation_lower = 0.0;  // max(0, -g_j) over u_j = -1

  double worst() const;
};

// Checks shapes and positivity of parameters; for the obstacle law also |u_prev| <= 1.
void validate_step_problem(const StepProblem& p, bool require_feasible);

/// Exact double-obstacle step, solved by the method selected in p.obstacle_method.
StepResult step_obstacle(const StepProblem& p);

/// Primal-dual active set method. u is eliminated through the mass equation, so
/// each iterate is one sparse solve for w on the current contact set and the mass
/// balance holds to round-off. Stops when the contact set repeats; contacts are
/// released when g has the wrong sign by more than inner_tol / 10. If the set
/// keeps changing after kMaxActiveSetIterations the iterate is handed to
/// projected Gauss-Seidel.
inline constexpr std::size_t kMaxActiveSetIterations = 60;
StepResult step_obstacle_active_set(const StepProblem& p);

/// Projected block Gauss-Seidel. Nodes are swept row-major; each 2x2 (u_j, w_j)
/// block is solved exactly with u_j projected onto [-1, 1]. Stops when the largest
/// nodal change, with w changes converted to u units through the mass equation,
/// drops below inner_tol.
StepResult step_obstacle_gauss_seidel(const StepProblem& p);

/// Same step with the inequality replaced by the Moreau-Yosida penalised equation
///   m_j w_j = eps (K u)_j + (m_j / eps) (beta_delta(u_j) - up_j).
/// Primal-dual active set iteration; each iterate is an exact sparse solve, so the
/// method terminates once the active set repeats.
StepResult step_moreau_yosida(const StepProblem& p, double delta);

/// Quartic double well with the lagged convex split 4 up^2 u - 4 up. The chemical
/// potential is obtained by BiCGSTAB; u is recovered from the mass equation, so
/// the discrete mass balance holds independently of the linear solver tolerance.
/// u is not projected.
StepResult step_quartic(const StepProblem& p);

StepResult step(const StepProblem& p, const PotentialSpec& pot);

KKTReport kkt_residual(const GridSpec& g, const StepResult& r, const StepProblem& p);

// |sum m_j (u_j - up_j) - tau sum m_j lambda_j (I_j - up_j)| divided by the domain area.
double mass_fidelity_defect(const StepProblem& p, const ScalarField& u_next);

}  // namespace chinpaint
