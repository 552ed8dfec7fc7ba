#include "chinpaint/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "chinpaint/config.hpp"
#include "chinpaint/errors.hpp"
#include "chinpaint/image_io.hpp"
#include "chinpaint/pipeline.hpp"

namespace chinpaint {

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_trace_file(const std::string& path, const InpaintResult& res) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open trace file " + path);
  for (std::size_t c = 0; c < res.reports.size(); ++c) {
    const ChannelReport& rep = res.reports[c];
    int stage = 1;
    for (const RunReport* r : {&rep.stage1, &rep.stage2}) {
      out << "# channel " << (c + 1) << " stage " << stage++ << " steps " << r->steps_taken << '\n';
      write_trace(out, *r);
      if (r->hit_max_steps) out << "# flagged: stopping tolerance not reached within max_steps\n";
      if (r->unconverged_steps)
        out << "# flagged: " << r->unconverged_steps << " steps hit the inner iteration cap\n";
    }
  }
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& err) {
  CLI::App app{"Double-obstacle Cahn-Hilliard inpainting of binary and grayscale images"};
  std::string image_path, mask_path, config_path;
  std::string out_path, error_map_path, trace_path, raw_path;
  double eps1 = 0, eps2 = 0, alpha = 0, alpha2 = 0, tau = 0, tol = 0, delta = 0, inner_tol = 0;
  std::string mode, potential;
  int channels = 8;
  std::size_t max_steps = 0;
  std::uint64_t seed = 0;
  unsigned threads = 0;

  app.add_option("--image", image_path, "Input image (PGM or PNG, 8-bit grayscale)")->required();
  app.add_option("--mask", mask_path, "Damage mask; pixels >= 128 are damaged")->required();
  app.add_option("--config", config_path, "key = value configuration file");
  auto* o_eps1 = app.add_option("--eps1", eps1, "Interface width, stage 1");
  auto* o_eps2 = app.add_option("--eps2", eps2, "Interface width, stage 2");
  auto* o_alpha = app.add_option("--alpha", alpha, "Fidelity weight, stage 1");
  auto* o_alpha2 = app.add_option("--alpha2", alpha2, "Fidelity weight, stage 2");
  auto* o_tau = app.add_option("--tau", tau, "Time step");
  auto* o_tol = app.add_option("--tol", tol, "Stopping tolerance for both stages");
  auto* o_mode = app.add_option("--mode", mode, "binary | grayscale");
  auto* o_pot = app.add_option("--potential", potential, "obstacle | my | quartic");
  auto* o_delta = app.add_option("--delta", delta, "Moreau-Yosida parameter (required for --potential my)");
  auto* o_k = app.add_option("--k-channels", channels, "Bit planes used in grayscale mode (1-8)");
  auto* o_steps = app.add_option("--max-steps", max_steps, "Step cap per stage");
  auto* o_inner = app.add_option("--inner-tol", inner_tol, "Inner solver tolerance");
  auto* o_out = app.add_option("--out", out_path, "Projected result image");
  auto* o_err = app.add_option("--error-map", error_map_path, "|input - result| image");
  auto* o_trace = app.add_option("--trace", trace_path, "Per-step trace file");
  auto* o_raw = app.add_option("--raw", raw_path, "Unprojected reconstruction image");
  auto* o_seed = app.add_option("--seed", seed, "Seed a small random initial field on the damaged set");
  app.add_option("--threads", threads, "Worker threads for grayscale channels (0: all cores)");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();  // program name
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    err << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitInvalidInput;
  }

  InpaintResult res;
  JobConfig cfg;
  try {
    if (!config_path.empty()) cfg = parse_config(read_text(config_path));
    if (o_eps1->count()) cfg.eps1 = eps1;
    if (o_eps2->count()) cfg.eps2 = eps2;
    if (o_alpha->count()) cfg.alpha = alpha;
    if (o_alpha2->count()) cfg.alpha2 = alpha2;
    if (o_tau->count()) cfg.tau = tau;
    if (o_tol->count()) cfg.tol1 = cfg.tol2 = tol;
    if (o_mode->count()) cfg.mode = parse_mode(mode);
    if (o_pot->count()) cfg.potential = parse_potential(potential);
    if (o_delta->count()) cfg.delta = delta;
    if (o_k->count()) cfg.channels = channels;
    if (o_steps->count()) cfg.max_steps = max_steps;
    if (o_inner->count()) cfg.inner_tol = inner_tol;
    if (o_out->count()) cfg.out_path = out_path;
    if (o_err->count()) cfg.error_map_path = error_map_path;
    if (o_trace->count()) cfg.trace_path = trace_path;
    if (o_raw->count()) cfg.raw_path = raw_path;
    if (o_tol->count() && !(tol > 0)) throw InvalidParameterError("--tol must be positive");

    InpaintJob job;
    job.schedule = cfg.schedule();
    job.mode = cfg.mode;
    job.channels = cfg.channels;
    job.max_threads = threads;
    if (o_seed->count()) job.seed = seed;
    job.image = read_image(image_path);
    job.mask = read_image(mask_path);
    res = inpaint(job);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  }

  for (const auto& w : res.warnings) err << "warning: " << w << '\n';
  try {
    if (!cfg.out_path.empty()) write_image(res.projected_image, cfg.out_path);
    if (!cfg.error_map_path.empty()) write_image(res.error_map, cfg.error_map_path);
    if (!cfg.raw_path.empty()) write_image(res.reconstructed, cfg.raw_path);
    if (!cfg.trace_path.empty()) write_trace_file(cfg.trace_path, res);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  }

  for (std::size_t c = 0; c < res.reports.size(); ++c) {
    const auto& r = res.reports[c];
    err << "channel " << (c + 1) << ": stage 1 " << r.stage1.steps_taken << " steps (stop "
        << r.stage1.stop_value_final << "), stage 2 " << r.stage2.steps_taken << " steps (stop "
        << r.stage2.stop_value_final << ")" << (r.converged() ? "" : " NOT CONVERGED") << '\n';
  }
  return res.converged() ? kExitOk : kExitNotConverged;
}

}  // namespace chinpaint
