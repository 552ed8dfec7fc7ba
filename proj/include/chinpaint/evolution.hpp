#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

#include "chinpaint/grid.hpp"
#include "chinpaint/potentials.hpp"
#include "chinpaint/step_solvers.hpp"

namespace chinpaint {

inline constexpr std::size_t kDefaultMaxSteps = 200000;

struct StageParams {
  double eps = 0.0;
  double alpha = 0.0;
  double tau = 0.0;
  double stop_tol = 0.0;
  std::size_t max_steps = kDefaultMaxSteps;
  double inner_tol = kDefaultInnerTol;
  std::size_t max_inner_iters = 0;

  void validate() const;
};

struct TwoStageConfig {
  StageParams stage1;
  StageParams stage2;
  PotentialSpec potential;
};

struct RunReport {
  std::size_t steps_taken = 0;
  double stop_value_final = 0.0;
  std::vector<double> stop_trace;    // lumped ||u_n - u_{n-1}||^2 per step
  std::vector<double> energy_trace;  // discrete energy of u_n
  double energy_initial = 0.0;       // discrete energy of u_0
  std::vector<double> mass_trace;    // lumped integral of u_n
  bool hit_max_steps = false;
  std::size_t unconverged_steps = 0;  // steps whose inner solver hit its cap
  std::size_t total_inner_iterations = 0;
  double max_mass_defect = 0.0;  // worst per-step mass-fidelity defect
  double max_abs_u = 0.0;        // largest |u| seen over all steps
};

struct StageRun {
  ScalarField u;
  ScalarField w;
  RunReport report;
};

struct TwoStageRun {
  ScalarField u;
  RunReport stage1;
  RunReport stage2;
};

// Called after every accepted step; used by diagnostics and tests.
using StepObserver = std::function<void(std::size_t step, const StepProblem&, const StepResult&)>;

// u0 = I off the damaged set and 0 on it.
ScalarField initial_field(const ScalarField& image, const std::vector<bool>& damaged);

/// Time-steps until the lumped squared change of u drops to stage.stop_tol or
/// stage.max_steps is reached. Inner solver failures are counted, not thrown.
StageRun run_stage(const ScalarField& u0, const ScalarField& image, const FidelityField& mask,
                   const StageParams& stage, const PotentialSpec& pot,
                   const ScalarField* w0 = nullptr, const StepObserver& observer = {});

/// Stage 1 with (eps1, alpha), then stage 2 from its output with (eps2, alpha2).
TwoStageRun run_two_stage(const ScalarField& u0, const ScalarField& image, const std::vector<bool>& damaged,
                          const TwoStageConfig& params, const StepObserver& observer = {});

// One line per step: index, stop value, energy, mass (tab separated).
void write_trace(std::ostream& os, const RunReport& report);

}  // namespace chinpaint
