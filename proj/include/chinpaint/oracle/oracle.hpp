#pragma once

// Brute-force verification routines. Everything here is assembled from first
// principles (P1 element matrices, dense linear algebra) and shares no solver
// code with the library paths it is used to check.

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "chinpaint/errors.hpp"
#include "chinpaint/grid.hpp"
#include "chinpaint/step_solvers.hpp"

namespace chinpaint::oracle {

class OracleFailure : public Error {
 public:
  using Error::Error;
};

// Stiffness matrix summed over the P1 element matrices of the right-triangle
// split of every cell.
Eigen::MatrixXd dense_stiffness(const GridSpec& g);
// Tensor-product trapezoid weights.
Eigen::VectorXd dense_lumped_mass(const GridSpec& g);

struct DenseStepSystem {
  Eigen::VectorXd mass;
  Eigen::MatrixXd stiffness;
  Eigen::VectorXd rhs_mass;  // m_j (up_j / tau + lambda_j (I_j - up_j))
  Eigen::VectorXd rhs_mu;    // m_j up_j / eps
  double eps = 0.0;
  double tau = 0.0;
};

DenseStepSystem assemble_dense(const StepProblem& p);

struct OracleSolution {
  ScalarField u;
  ScalarField w;
  std::size_t systems_solved = 0;
  bool enumerated = false;  // exhaustive 3^n search rather than PDAS restarts
};

inline constexpr std::size_t kEnumerationLimit = 10;
inline constexpr std::size_t kOracleNodeCap = 64;

/// KKT point of the discrete obstacle step. Up to kEnumerationLimit nodes every
/// {lower, free, upper} assignment is solved and checked; above that a primal-dual
/// active set iteration with seeded random restarts is used.
/// reverse_order walks the assignments from the last code down; the accepted u
/// must not depend on it.
OracleSolution oracle_step_dense(const StepProblem& p, std::uint64_t seed = 1, bool reverse_order = false);

/// |sum_{lambda>0} m_j (I_j - u_j)| / sum_{lambda>0} m_j.
double check_stationarity(const ScalarField& u, const ScalarField& image, const FidelityField& fid);

/// Max-norm gap between the analytic gradient of the regularised energy and a
/// finite difference of discrete_energy (central, or one-sided near |u| = 1).
double energy_gradient_check(const GridSpec& g, const ScalarField& u, double eps, double delta);

// Plain-text pass/fail log consumed by the acceptance suite.
class VerificationReport {
 public:
  bool check(const std::string& name, double value, double bound);           // pass iff value <= bound
  bool check_at_least(const std::string& name, double value, double bound);  // pass iff value >= bound
  bool record(const std::string& name, bool ok, const std::string& detail);
  bool all_passed() const { return failures_ == 0; }
  std::string text() const { return text_; }

 private:
  std::string text_;
  int failures_ = 0;
};

}  // namespace chinpaint::oracle
