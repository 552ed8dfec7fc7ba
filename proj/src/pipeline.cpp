#include "chinpaint/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>

#include "chinpaint/errors.hpp"

namespace chinpaint {

bool ChannelReport::converged() const {
  return !stage1.hit_max_steps && !stage2.hit_max_steps && stage1.unconverged_steps == 0 &&
         stage2.unconverged_steps == 0;
}

bool InpaintResult::converged() const {
  return std::all_of(reports.begin(), reports.end(), [](const ChannelReport& r) { return r.converged(); });
}

ScalarField project_binary(const ScalarField& f) {
  ScalarField out(f.grid);
  for (std::size_t k = 0; k < f.size(); ++k) out[k] = f[k] >= 0.0 ? 1.0 : -1.0;
  return out;
}

std::vector<ScalarField> bit_split(const Grayscale8Image& img, int channels) {
  if (channels < 1 || channels > 8)
    throw InvalidParameterError("channel count must be in [1, 8], got " + std::to_string(channels));
  const GridSpec g = build_grid(img.width, img.height);
  std::vector<ScalarField> out(static_cast<std::size_t>(channels), ScalarField(g));
  for (std::size_t k = 0; k < g.size(); ++k) {
    const unsigned p = img.pixels[k];
    for (int c = 0; c < channels; ++c) out[static_cast<std::size_t>(c)][k] = ((p >> (7 - c)) & 1u) ? 1.0 : -1.0;
  }
  return out;
}

Grayscale8Image bit_assemble(const std::vector<ScalarField>& channels) {
  if (channels.empty() || channels.size() > 8)
    throw InvalidParameterError("bit_assemble needs 1 to 8 channels");
  const GridSpec& g = channels.front().grid;
  for (const auto& ch : channels) {
    require_same_grid(g, ch, "bit_assemble");
    for (double v : ch.values)
      if (v != 1.0 && v != -1.0) throw InvalidInputError("bit_assemble: channel is not binary-valued");
  }
  const int kc = static_cast<int>(channels.size());
  const unsigned full = (1u << kc) - 1u;
  Grayscale8Image img(g.nx, g.ny);
  for (std::size_t k = 0; k < g.size(); ++k) {
    unsigned code = 0;
    for (int c = 0; c < kc; ++c) code = (code << 1) | (channels[static_cast<std::size_t>(c)][k] > 0.0 ? 1u : 0u);
    img.pixels[k] = kc == 8 ? static_cast<std::uint8_t>(code)
                            : static_cast<std::uint8_t>((255u * code + full / 2) / full);
  }
  return img;
}

Grayscale8Image error_map(const Grayscale8Image& original, const Grayscale8Image& result) {
  if (original.width != result.width || original.height != result.height)
    throw ShapeError("error_map: image dimensions differ");
  Grayscale8Image out(original.width, original.height);
  for (std::size_t k = 0; k < out.pixels.size(); ++k)
    out.pixels[k] = static_cast<std::uint8_t>(std::abs(int(original.pixels[k]) - int(result.pixels[k])));
  return out;
}

std::vector<bool> damaged_nodes(const Grayscale8Image& mask) {
  std::vector<bool> d(mask.pixels.size());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = mask.pixels[k] >= 128;
  return d;
}

namespace {

struct ChannelOutcome {
  ScalarField raw;
  ChannelReport report;
};

void check_job(const InpaintJob& job) {
  if (job.image.width != job.mask.width || job.image.height != job.mask.height)
    throw ShapeError("image and mask dimensions differ");
  if (job.image.pixels.size() != job.image.width * job.image.height ||
      job.mask.pixels.size() != job.mask.width * job.mask.height)
    throw ShapeError("pixel buffer does not match the stated dimensions");
  job.schedule.stage1.validate();
  job.schedule.stage2.validate();
  const auto d = damaged_nodes(job.mask);
  const auto n_damaged = static_cast<std::size_t>(std::count(d.begin(), d.end(), true));
  if (n_damaged == 0) throw InvalidMaskError("mask marks no damaged pixels");
  if (n_damaged == d.size()) throw InvalidMaskError("mask marks every pixel as damaged");
}

ChannelOutcome solve_channel(const ScalarField& image, const std::vector<bool>& damaged, const InpaintJob& job,
                             std::size_t channel_index) {
  ScalarField u0 = initial_field(image, damaged);
  if (job.seed) {
    std::mt19937_64 rng(*job.seed + channel_index);
    std::uniform_real_distribution<double> jitter(-1e-3, 1e-3);
    for (std::size_t k = 0; k < u0.size(); ++k)
      if (damaged[k]) u0[k] = jitter(rng);
  }
  TwoStageRun run = run_two_stage(u0, image, damaged, job.schedule, job.observer);
  return {std::move(run.u), {std::move(run.stage1), std::move(run.stage2)}};
}

// Channels are independent; each worker owns the outcome slot it writes.
std::vector<ChannelOutcome> solve_channels(const std::vector<ScalarField>& images, const std::vector<bool>& damaged,
                                           const InpaintJob& job) {
  std::vector<ChannelOutcome> out(images.size());
  unsigned threads = job.max_threads ? job.max_threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(images.size()));
  if (threads <= 1) {
    for (std::size_t c = 0; c < images.size(); ++c) out[c] = solve_channel(images[c], damaged, job, c);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(images.size());
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t c = next++; c < images.size(); c = next++) {
          try {
            out[c] = solve_channel(images[c], damaged, job, c);
          } catch (...) {
            errors[c] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0))); }

}  // namespace

InpaintResult inpaint_binary(const InpaintJob& job) {
  check_job(job);
  InpaintResult res;
  Grayscale8Image binary = job.image;
  std::size_t snapped = 0;
  for (auto& px : binary.pixels) {
    if (px != 0 && px != 255) {
      px = px >= 128 ? 255 : 0;
      ++snapped;
    }
  }
  if (snapped)
    res.warnings.push_back(std::to_string(snapped) + " non-binary pixels snapped to 0 or 255");

  const GridSpec g = build_grid(binary.width, binary.height);
  const std::vector<bool> damaged = damaged_nodes(job.mask);
  auto outcomes = solve_channels({field_from_image(binary, g)}, damaged, job);

  res.raw_fields.push_back(std::move(outcomes[0].raw));
  res.reports.push_back(std::move(outcomes[0].report));
  res.reconstructed = image_from_field(res.raw_fields[0]);
  res.projected_image = image_from_field(project_binary(res.raw_fields[0]));
  res.error_map = error_map(job.image, res.projected_image);
  return res;
}

InpaintResult inpaint_grayscale(const InpaintJob& job) {
  check_job(job);
  if (job.channels < 1 || job.channels > 8)
    throw InvalidParameterError("channel count must be in [1, 8], got " + std::to_string(job.channels));
  InpaintResult res;
  const std::vector<ScalarField> planes = bit_split(job.image, job.channels);
  const std::vector<bool> damaged = damaged_nodes(job.mask);
  auto outcomes = solve_channels(planes, damaged, job);

  std::vector<ScalarField> projected;
  for (auto& o : outcomes) {
    projected.push_back(project_binary(o.raw));
    res.raw_fields.push_back(std::move(o.raw));
    res.reports.push_back(std::move(o.report));
  }
  res.projected_image = bit_assemble(projected);

  // Unprojected reconstruction: each channel's phase mapped to [0, 1] and weighted by its bit.
  const GridSpec& g = res.raw_fields.front().grid;
  const double full = static_cast<double>((1u << job.channels) - 1u);
  res.reconstructed = Grayscale8Image(g.nx, g.ny);
  for (std::size_t k = 0; k < g.size(); ++k) {
    double code = 0.0;
    for (const auto& f : res.raw_fields) code = 2.0 * code + 0.5 * (std::clamp(f[k], -1.0, 1.0) + 1.0);
    res.reconstructed.pixels[k] = to_byte(255.0 * code / full);
  }
  res.error_map = error_map(job.image, res.projected_image);
  return res;
}

InpaintResult inpaint(const InpaintJob& job) {
  return job.mode == InpaintMode::Binary ? inpaint_binary(job) : inpaint_grayscale(job);
}

}  // namespace chinpaint
