#include "chinpaint/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>

#include "chinpaint/errors.hpp"

namespace chinpaint {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double positive_real(std::string_view v, std::string_view key, int line) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
    throw ParseError("'" + std::string(key) + "' expects a number, got '" + std::string(v) + "'", line);
  if (!(out > 0.0)) throw ParseError("'" + std::string(key) + "' must be positive", line);
  return out;
}

std::size_t count_value(std::string_view v, std::string_view key, int line, std::size_t min) {
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ParseError("'" + std::string(key) + "' expects an integer, got '" + std::string(v) + "'", line);
  if (out < min) throw ParseError("'" + std::string(key) + "' must be at least " + std::to_string(min), line);
  return out;
}

}  // namespace

InpaintMode parse_mode(std::string_view s) {
  if (s == "binary") return InpaintMode::Binary;
  if (s == "grayscale") return InpaintMode::Grayscale;
  throw InvalidParameterError("mode must be binary or grayscale, got '" + std::string(s) + "'");
}

PotentialKind parse_potential(std::string_view s) {
  if (s == "obstacle") return PotentialKind::Obstacle;
  if (s == "my") return PotentialKind::MoreauYosida;
  if (s == "quartic") return PotentialKind::Quartic;
  throw InvalidParameterError("potential must be obstacle, my or quartic, got '" + std::string(s) + "'");
}

double JobConfig::stage1_tol() const {
  return tol1.value_or(mode == InpaintMode::Grayscale ? kGrayscaleStopTol : kBinaryStopTol);
}

double JobConfig::stage2_tol() const { return tol2.value_or(stage1_tol()); }

void JobConfig::validate() const {
  if (!(eps1 > 0 && eps2 > 0 && alpha > 0 && alpha2 > 0 && tau > 0 && inner_tol > 0))
    throw InvalidParameterError("eps1, eps2, alpha, alpha2, tau and inner_tol must be positive");
  if (max_steps < 1) throw InvalidParameterError("max_steps must be at least 1");
  if (potential == PotentialKind::MoreauYosida && !delta)
    throw InvalidParameterError("the Moreau-Yosida potential requires delta");
  if (potential != PotentialKind::MoreauYosida && delta)
    throw InvalidParameterError("delta is only meaningful for the Moreau-Yosida potential");
  if (delta && !(*delta > 0)) throw InvalidParameterError("delta must be positive");
  if (channels < 1 || channels > 8) throw InvalidParameterError("k_channels must lie in [1, 8]");
}

TwoStageConfig JobConfig::schedule() const {
  validate();
  TwoStageConfig s;
  s.stage1 = {eps1, alpha, tau, stage1_tol(), max_steps, inner_tol, max_inner_iters};
  s.stage2 = {eps2, alpha2, tau, stage2_tol(), max_steps, inner_tol, max_inner_iters};
  s.potential = potential == PotentialKind::MoreauYosida ? PotentialSpec::moreau_yosida(*delta)
                                                         : PotentialSpec{potential, 0.0};
  return s;
}

JobConfig parse_config(std::string_view text, JobConfig cfg) {
  using Setter = std::function<void(std::string_view, int)>;
  const std::map<std::string, Setter, std::less<>> setters = {
      {"eps1", [&](auto v, int l) { cfg.eps1 = positive_real(v, "eps1", l); }},
      {"eps2", [&](auto v, int l) { cfg.eps2 = positive_real(v, "eps2", l); }},
      {"alpha", [&](auto v, int l) { cfg.alpha = positive_real(v, "alpha", l); }},
      {"alpha2", [&](auto v, int l) { cfg.alpha2 = positive_real(v, "alpha2", l); }},
      {"tau", [&](auto v, int l) { cfg.tau = positive_real(v, "tau", l); }},
      {"tol1", [&](auto v, int l) { cfg.tol1 = positive_real(v, "tol1", l); }},
      {"tol2", [&](auto v, int l) { cfg.tol2 = positive_real(v, "tol2", l); }},
      {"tol", [&](auto v, int l) { cfg.tol1 = cfg.tol2 = positive_real(v, "tol", l); }},
      {"delta", [&](auto v, int l) { cfg.delta = positive_real(v, "delta", l); }},
      {"inner_tol", [&](auto v, int l) { cfg.inner_tol = positive_real(v, "inner_tol", l); }},
      {"max_steps", [&](auto v, int l) { cfg.max_steps = count_value(v, "max_steps", l, 1); }},
      {"max_inner_iters", [&](auto v, int l) { cfg.max_inner_iters = count_value(v, "max_inner_iters", l, 1); }},
      {"k_channels",
       [&](auto v, int l) {
         const auto k = count_value(v, "k_channels", l, 1);
         if (k > 8) throw ParseError("'k_channels' must be at most 8", l);
         cfg.channels = static_cast<int>(k);
       }},
      {"mode",
       [&](auto v, int l) {
         try {
           cfg.mode = parse_mode(v);
         } catch (const InvalidParameterError& e) {
           throw ParseError(e.what(), l);
         }
       }},
      {"potential",
       [&](auto v, int l) {
         try {
           cfg.potential = parse_potential(v);
         } catch (const InvalidParameterError& e) {
           throw ParseError(e.what(), l);
         }
       }},
      {"out", [&](auto v, int) { cfg.out_path = v; }},
      {"error_map", [&](auto v, int) { cfg.error_map_path = v; }},
      {"trace", [&](auto v, int) { cfg.trace_path = v; }},
      {"raw", [&](auto v, int) { cfg.raw_path = v; }},
  };

  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find('\n', start), text.size());
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no);
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ParseError("expected 'key = value'", line_no);
    const auto it = setters.find(key);
    if (it == setters.end()) throw ParseError("unknown key '" + std::string(key) + "'", line_no);
    it->second(value, line_no);
  }
  return cfg;
}

}  // namespace chinpaint
