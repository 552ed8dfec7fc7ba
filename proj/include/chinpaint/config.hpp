#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "chinpaint/evolution.hpp"
#include "chinpaint/pipeline.hpp"
#include "chinpaint/potentials.hpp"

namespace chinpaint {

// Run configuration. Defaults reproduce the binary-image schedule
// eps 0.04 -> 1/300, alpha 8e3 -> 1e5, tau 1e-5.
struct JobConfig {
  double eps1 = 0.04;
  double eps2 = 1.0 / 300.0;
  double alpha = 8.0e3;
  double alpha2 = 1.0e5;
  double tau = 1.0e-5;
  std::optional<double> tol1;  // unset: 5e-6 binary, 1e-7 grayscale
  std::optional<double> tol2;  // unset: same as stage 1
  InpaintMode mode = InpaintMode::Binary;
  PotentialKind potential = PotentialKind::Obstacle;
  std::optional<double> delta;
  std::size_t max_steps = kDefaultMaxSteps;
  int channels = 8;
  double inner_tol = kDefaultInnerTol;
  std::size_t max_inner_iters = 0;

  std::string out_path;
  std::string error_map_path;
  std::string trace_path;
  std::string raw_path;

  double stage1_tol() const;
  double stage2_tol() const;

  // Cross-field checks: delta present iff the Moreau-Yosida law is selected, K in [1, 8].
  void validate() const;
  TwoStageConfig schedule() const;
};

// "key = value" per line, '#' starts a comment. Throws ParseError with the line number.
JobConfig parse_config(std::string_view text, JobConfig base = {});

InpaintMode parse_mode(std::string_view s);
PotentialKind parse_potential(std::string_view s);

}  // namespace chinpaint
