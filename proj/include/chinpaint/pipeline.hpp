#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chinpaint/evolution.hpp"
#include "chinpaint/grid.hpp"
#include "chinpaint/image.hpp"

namespace chinpaint {

enum class InpaintMode { Binary, Grayscale };

inline constexpr double kBinaryStopTol = 5.0e-6;
inline constexpr double kGrayscaleStopTol = 1.0e-7;

struct InpaintJob {
  Grayscale8Image image;
  Grayscale8Image mask;  // pixel >= 128 marks damage
  InpaintMode mode = InpaintMode::Binary;
  int channels = 8;  // K, grayscale mode only
  TwoStageConfig schedule;
  // When set, the initial field on damaged nodes is a small seeded uniform
  // perturbation of 0 instead of exactly 0.
  std::optional<std::uint64_t> seed;
  unsigned max_threads = 0;  // 0: hardware concurrency
  StepObserver observer;     // called after every step; may run concurrently across channels
};

struct ChannelReport {
  RunReport stage1;
  RunReport stage2;
  bool converged() const;
};

struct InpaintResult {
  std::vector<ScalarField> raw_fields;  // one per channel
  Grayscale8Image reconstructed;        // unprojected fields mapped to 8 bits
  Grayscale8Image projected_image;
  Grayscale8Image error_map;            // against the input image
  std::vector<ChannelReport> reports;
  std::vector<std::string> warnings;

  bool converged() const;
};

/// Sign projection onto binary images: +1 where f >= 0, -1 elsewhere.
ScalarField project_binary(const ScalarField& f);

/// Splits each pixel into its K most significant bits, most significant first.
/// Bit 1 maps to +1, bit 0 to -1.
std::vector<ScalarField> bit_split(const Grayscale8Image& img, int channels);

/// Inverse of bit_split. For K < 8 the K-bit code q is rescaled to round(255 q / (2^K - 1)).
Grayscale8Image bit_assemble(const std::vector<ScalarField>& channels);

Grayscale8Image error_map(const Grayscale8Image& original, const Grayscale8Image& result);

std::vector<bool> damaged_nodes(const Grayscale8Image& mask);

InpaintResult inpaint_binary(const InpaintJob& job);
InpaintResult inpaint_grayscale(const InpaintJob& job);
InpaintResult inpaint(const InpaintJob& job);

}  // namespace chinpaint
