#include <doctest.h>

#include <Eigen/Dense>

#include "chinpaint/errors.hpp"
#include "chinpaint/oracle/oracle.hpp"
#include "support.hpp"

using namespace chinpaint;
using namespace testing;

namespace {

const ObstacleMethod kMethods[] = {ObstacleMethod::ActiveSet, ObstacleMethod::BlockGaussSeidel};

StepProblem pure_phase_problem(std::size_t n, double alpha) {
  const GridSpec g = build_grid(n, n);
  std::vector<bool> damaged(g.size(), false);
  damaged[g.size() / 2] = true;
  StepProblem p;
  p.grid = g;
  p.u_prev = ScalarField(g, 1.0);
  p.image = ScalarField(g, 1.0);
  p.fidelity = make_fidelity(g, damaged, alpha);
  p.eps = 0.05;
  p.tau = 1e-4;
  return p;
}

}  // namespace

TEST_CASE("pure phase is a fixed point of every solver") {
  for (double alpha : {1.0, 1e3, 1e6}) {
    StepProblem p = pure_phase_problem(6, alpha);
    for (ObstacleMethod m : kMethods) {
      p.obstacle_method = m;
      const StepResult r = step_obstacle(p);
      CHECK(r.converged);
      for (double v : r.u_next.values) CHECK(v == 1.0);
      for (double v : r.w_next.values) CHECK(v == doctest::Approx(r.w_next[0]).epsilon(1e-9));
      const KKTReport k = kkt_residual(p.grid, r, p);
      CHECK(k.max_sign_violation_upper <= 10 * p.inner_tol);
      CHECK(r.active_upper == p.grid.size());
    }
    const StepResult q = step_quartic(p);
    CHECK(max_abs_diff(q.u_next, ScalarField(p.grid, 1.0)) <= 1e-12);
  }
}

TEST_CASE("pure Cahn-Hilliard conserves mass for every solver") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 5; ++t) {
    StepProblem p = random_problem(9, 7, rng, 1.0, 0.1, 1e-3, 0.4);
    p.fidelity = no_fidelity(p.grid);
    for (ObstacleMethod m : kMethods) {
      p.obstacle_method = m;
      const StepResult r = step_obstacle(p);
      CHECK(r.converged);
      CHECK(relative_mass_drift(p.grid, r.u_next, p.u_prev) <= 1e-10);
    }
    CHECK(relative_mass_drift(p.grid, step_moreau_yosida(p, 1e-3).u_next, p.u_prev) <= 1e-10);
    CHECK(relative_mass_drift(p.grid, step_quartic(p).u_next, p.u_prev) <= 1e-10);
  }
}

TEST_CASE("obstacle step matches the dense oracle on random 8x8 problems") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 10; ++t) {
    StepProblem p = random_problem(8, 8, rng, 1e3, 0.1, 1e-5);
    const auto oracle_u = oracle::oracle_step_dense(p).u;
    for (ObstacleMethod m : kMethods) {
      p.obstacle_method = m;
      const StepResult r = step_obstacle(p);
      CHECK(r.converged);
      CHECK(max_abs_diff(r.u_next, oracle_u) <= 1e-8);
    }
  }
}

TEST_CASE("active set and Gauss-Seidel agree on contact-rich problems") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 10; ++t) {
    StepProblem p = random_problem(12, 10, rng, 1e3, 0.08, 1e-5, 0.6);
    p.inner_tol = 1e-11;
    p.obstacle_method = ObstacleMethod::ActiveSet;
    const StepResult a = step_obstacle(p);
    p.obstacle_method = ObstacleMethod::BlockGaussSeidel;
    p.max_inner_iters = 200000;
    const StepResult b = step_obstacle(p);
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    CHECK(a.active_upper + a.active_lower > 0);
    CHECK(max_abs_diff(a.u_next, b.u_next) <= 1e-8);
  }
}

TEST_CASE("converged obstacle steps satisfy complementarity and the mass identity") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    StepProblem p = random_problem(16, 16, rng, 1e3, 0.05, 1e-4, 0.5);
    for (ObstacleMethod m : kMethods) {
      p.obstacle_method = m;
      p.max_inner_iters = 100000;
      const StepResult r = step_obstacle(p);
      REQUIRE(r.converged);
      CHECK(max_abs(r.u_next) <= 1.0);
      const KKTReport k = kkt_residual(p.grid, r, p);
      CHECK(k.max_interior_residual >= 0.0);
      CHECK(k.worst() <= 10 * p.inner_tol);
      if (m == ObstacleMethod::ActiveSet) CHECK(mass_fidelity_defect(p, r.u_next) <= 1e-10);
    }
  }
}

TEST_CASE("kkt_residual on hand-built pairs") {
  const GridSpec g = build_grid(2, 2);
  StepProblem p;
  p.grid = g;
  p.u_prev = ScalarField(g, 0.0);
  p.image = ScalarField(g, 0.0);
  p.fidelity = no_fidelity(g);
  p.eps = 1.0;
  p.tau = 1.0;
  StepResult r;
  r.u_next = ScalarField(g, 0.0);
  r.w_next = ScalarField(g, 1.0);
  KKTReport k = kkt_residual(g, r, p);
  CHECK(k.max_interior_residual == doctest::Approx(0.25));
  CHECK(k.max_sign_violation_upper == 0.0);
  CHECK(k.max_sign_violation_lower == 0.0);

  r.u_next = ScalarField(g, 1.0);
  for (std::size_t j = 0; j < 4; ++j) r.w_next[j] = 1.0 / g.weight(j) - p.u_prev[j] / p.eps;
  k = kkt_residual(g, r, p);
  CHECK(k.worst() == 0.0);

  // Wrong sign at an upper contact.
  for (std::size_t j = 0; j < 4; ++j) r.w_next[j] = -1.0 / g.weight(j);
  k = kkt_residual(g, r, p);
  CHECK(k.max_sign_violation_upper == doctest::Approx(1.0));
}

TEST_CASE("obstacle step input validation") {
  std::mt19937_64 rng(4);
  StepProblem p = random_problem(5, 5, rng, 10.0, 0.1, 1e-4);
  p.u_prev[3] = 1.5;
  for (ObstacleMethod m : kMethods) {
    p.obstacle_method = m;
    CHECK_THROWS_AS(step_obstacle(p), ConstraintViolationError);
  }
  CHECK_NOTHROW(step_moreau_yosida(p, 1e-2));
  CHECK_NOTHROW(step_quartic(p));
  p.u_prev[3] = 0.0;
  p.tau = 0.0;
  CHECK_THROWS_AS(step_obstacle(p), InvalidParameterError);
  p.tau = 1e-4;
  p.image = ScalarField(build_grid(4, 5));
  CHECK_THROWS_AS(step_obstacle(p), ShapeError);
  CHECK_THROWS_AS(step_moreau_yosida(random_problem(4, 4, rng, 1.0, 0.1, 1e-4), 0.0), InvalidParameterError);
}

TEST_CASE("iteration cap is flagged, not thrown") {
  std::mt19937_64 rng(5);
  StepProblem p = random_problem(16, 16, rng, 1e3, 0.05, 1e-3, 0.3);
  p.obstacle_method = ObstacleMethod::BlockGaussSeidel;
  p.max_inner_iters = 2;
  const StepResult r = step_obstacle(p);
  CHECK_FALSE(r.converged);
  CHECK(r.inner_iterations == 2);
  CHECK(max_abs(r.u_next) <= 1.0);
}

TEST_CASE("a source the box cannot hold is flagged") {
  // The fidelity source asks for far more mass than the box can take.
  const GridSpec g = build_grid(4, 4);
  std::vector<bool> damaged(g.size(), false);
  damaged[0] = true;
  StepProblem p;
  p.grid = g;
  p.image = ScalarField(g, 1.0);
  p.fidelity = make_fidelity(g, damaged, 1e3);
  p.eps = 0.1;
  p.tau = 1.0;
  p.max_inner_iters = 500;
  p.u_prev = ScalarField(g, 0.95);
  const StepResult r = step_obstacle(p);
  CHECK_FALSE(r.converged);
  CHECK(max_abs(r.u_next) <= 1.0);
}

TEST_CASE("pure Cahn-Hilliard step does not increase the energy") {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 10; ++t) {
    StepProblem p = random_problem(4, 4, rng, 1.0, 0.2, 1e-3, 0.25);
    p.fidelity = no_fidelity(p.grid);
    for (ObstacleMethod m : kMethods) {
      p.obstacle_method = m;
      const StepResult r = step_obstacle(p);
      CHECK(discrete_energy(p.grid, r.u_next, p.eps, PotentialSpec::obstacle()) <=
            discrete_energy(p.grid, p.u_prev, p.eps, PotentialSpec::obstacle()) + 1e-10);
    }
  }
}

TEST_CASE("Moreau-Yosida step away from the obstacle is the unconstrained linear solve") {
  std::mt19937_64 rng(7);
  StepProblem p = random_problem(6, 6, rng, 1e2, 0.1, 1e-7);
  for (double& v : p.u_prev.values) v *= 0.5;
  const StepResult r = step_moreau_yosida(p, 1e-3);
  CHECK(r.converged);
  const oracle::DenseStepSystem s = oracle::assemble_dense(p);
  const auto n = s.mass.size();
  Eigen::MatrixXd a(2 * n, 2 * n);
  a << Eigen::MatrixXd(s.mass.asDiagonal()) / s.tau, s.stiffness, s.eps * s.stiffness, -Eigen::MatrixXd(s.mass.asDiagonal());
  Eigen::VectorXd b(2 * n);
  b << s.rhs_mass, s.rhs_mu;
  const Eigen::VectorXd x = a.fullPivLu().solve(b);
  for (Eigen::Index j = 0; j < n; ++j) CHECK(r.u_next[static_cast<std::size_t>(j)] == doctest::Approx(x[j]).epsilon(1e-10));
  for (double v : r.u_next.values) CHECK(std::abs(v) < 1.0);
}

TEST_CASE("Moreau-Yosida steps approach the obstacle step as delta shrinks") {
  std::mt19937_64 rng(8);
  StepProblem p = random_problem(16, 16, rng, 1e3, 0.05, 1e-3, 0.5);
  const StepResult exact = step_obstacle(p);
  REQUIRE(exact.converged);
  double last_distance = 1e300, last_overshoot = 1e300;
  for (double delta : {1e-2, 1e-3, 1e-4}) {
    const StepResult r = step_moreau_yosida(p, delta);
    CHECK(r.converged);
    const double distance = max_abs_diff(r.u_next, exact.u_next);
    const double overshoot = std::max(0.0, max_abs(r.u_next) - 1.0);
    CHECK(distance <= last_distance);
    CHECK(overshoot <= last_overshoot);
    last_distance = distance;
    last_overshoot = overshoot;
  }
  CHECK(last_distance < 1e-2);
}

TEST_CASE("quartic step differs from the obstacle step and may leave [-1, 1]") {
  std::mt19937_64 rng(9);
  StepProblem p = random_problem(8, 8, rng, 1e3, 0.1, 1e-5);
  const StepResult obstacle = step_obstacle(p);
  const StepResult quartic = step_quartic(p);
  CHECK(quartic.converged);
  CHECK(max_abs_diff(obstacle.u_next, quartic.u_next) > 1e-6);
  CHECK(mass_fidelity_defect(p, quartic.u_next) <= 1e-10);

  // A saturated start overshoots the wells under the quartic law only.
  StepProblem s = random_problem(16, 16, rng, 1e3, 0.05, 1e-3, 0.9);
  double worst = 0.0;
  for (int n = 0; n < 5; ++n) {
    const StepResult q = step_quartic(s);
    worst = std::max(worst, max_abs(q.u_next));
    s.u_prev = q.u_next;
  }
  CHECK(worst > 1.0);
}
