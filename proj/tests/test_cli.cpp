#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "chinpaint/cli.hpp"
#include "chinpaint/fixtures.hpp"
#include "chinpaint/image_io.hpp"

using namespace chinpaint;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  fs::path image, mask, gray, gray_mask;

  Scratch() : dir(fs::temp_directory_path() / "chinpaint_test_cli") {
    fs::create_directories(dir);
    image = dir / "stripe.pgm";
    mask = dir / "mask.pgm";
    gray = dir / "gray.png";
    gray_mask = dir / "cross.pgm";
    write_image(fixtures::stripe_image(24), image);
    write_image(fixtures::centred_square_mask(24, 0.2), mask);
    write_image(Grayscale8Image(10, 10, 200), gray);
    write_image(fixtures::cross_mask(10, 1), gray_mask);
  }
  fs::path operator/(const std::string& name) const { return dir / name; }
};

const Scratch& scratch() {
  static const Scratch s;
  return s;
}

struct Run {
  int code;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "chinpaint");
  std::ostringstream err;
  const int code = cli_main(args, err);
  return {code, err.str()};
}

const std::vector<std::string> kQuick = {"--eps1", "0.1", "--eps2", "0.05", "--alpha", "1e3",
                                         "--alpha2", "1e4", "--tau", "1e-4", "--tol", "1e-8"};

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("binary run writes every artifact") {
  const Scratch& s = scratch();
  const Run r = run(with({"--image", s.image.string(), "--mask", s.mask.string(), "--out", (s / "out.pgm").string(),
                          "--error-map", (s / "err.pgm").string(), "--trace", (s / "trace.txt").string(),
                          "--raw", (s / "raw.png").string()},
                         kQuick));
  CHECK(r.code == kExitOk);
  const Grayscale8Image out = read_image(s / "out.pgm");
  CHECK(out.width == 24);
  for (auto px : out.pixels) CHECK((px == 0 || px == 255));
  CHECK(read_image(s / "err.pgm").width == 24);
  CHECK(read_image(s / "raw.png").height == 24);
  const std::string trace = slurp(s / "trace.txt");
  CHECK(trace.rfind("# channel 1 stage 1 steps ", 0) == 0);
  CHECK(trace.find("# channel 1 stage 2") != std::string::npos);
  CHECK(trace.find("flagged") == std::string::npos);
}

TEST_CASE("default configuration runs end to end") {
  const Scratch& s = scratch();
  const Run r = run({"--image", s.image.string(), "--mask", s.mask.string(), "--out", (s / "default.pgm").string()});
  CHECK(r.code == kExitOk);
  CHECK(fs::exists(s / "default.pgm"));
}

TEST_CASE("identical invocations give identical bytes") {
  const Scratch& s = scratch();
  for (const char* name : {"det_a.pgm", "det_b.pgm"})
    REQUIRE(run(with({"--image", s.image.string(), "--mask", s.mask.string(), "--out", (s / name).string(), "--seed", "5"},
                     kQuick))
                .code == kExitOk);
  CHECK(slurp(s / "det_a.pgm") == slurp(s / "det_b.pgm"));
}

TEST_CASE("grayscale mode via a config file") {
  const Scratch& s = scratch();
  std::ofstream(s / "gray.cfg") << "mode = grayscale\nk_channels = 8\neps1 = 0.1\neps2 = 0.05\nalpha = 1e3\n"
                                   "alpha2 = 1e4\ntau = 1e-4\ntol = 1e-8\n";
  const Run r = run({"--image", s.gray.string(), "--mask", s.gray_mask.string(), "--config", (s / "gray.cfg").string(),
                     "--out", (s / "gray_out.pgm").string()});
  CHECK(r.code == kExitOk);
  CHECK(read_image(s / "gray_out.pgm") == Grayscale8Image(10, 10, 200));
}

TEST_CASE("validation failures exit with 2") {
  const Scratch& s = scratch();
  Run r = run({"--image", s.image.string()});
  CHECK(r.code == kExitInvalidInput);
  CHECK(r.err.find("--mask") != std::string::npos);
  CHECK(run({"--image", s.image.string(), "--mask", s.mask.string(), "--potential", "my"}).code == kExitInvalidInput);
  CHECK(run({"--image", s.image.string(), "--mask", s.mask.string(), "--delta", "1e-3"}).code == kExitInvalidInput);
  CHECK(run({"--image", s.image.string(), "--mask", s.mask.string(), "--mode", "rgb"}).code == kExitInvalidInput);
  CHECK(run({"--image", s.image.string(), "--mask", s.mask.string(), "--tau", "-1"}).code == kExitInvalidInput);
  CHECK(run({"--image", s.image.string(), "--mask", s.mask.string(), "--k-channels", "9", "--mode", "grayscale"}).code ==
        kExitInvalidInput);
  CHECK(run({"--image", (s / "nope.pgm").string(), "--mask", s.mask.string()}).code == kExitInvalidInput);
  CHECK(run({"--image", s.image.string(), "--mask", s.gray_mask.string()}).code == kExitInvalidInput);
  write_image(Grayscale8Image(24, 24, 0), s / "empty_mask.pgm");
  CHECK(run({"--image", s.image.string(), "--mask", (s / "empty_mask.pgm").string()}).code == kExitInvalidInput);
  std::ofstream(s / "bad.cfg") << "alpha = -3\n";
  r = run({"--image", s.image.string(), "--mask", s.mask.string(), "--config", (s / "bad.cfg").string()});
  CHECK(r.code == kExitInvalidInput);
  CHECK(r.err.find("line 1") != std::string::npos);
}

TEST_CASE("step budget exhaustion exits with 3 and still writes outputs") {
  const Scratch& s = scratch();
  fs::remove(s / "capped.pgm");
  const Run r = run(with({"--image", s.image.string(), "--mask", s.mask.string(), "--out", (s / "capped.pgm").string(),
                          "--trace", (s / "capped.txt").string(), "--max-steps", "2"},
                         kQuick));
  CHECK(r.code == kExitNotConverged);
  CHECK(fs::exists(s / "capped.pgm"));
  CHECK(slurp(s / "capped.txt").find("# flagged") != std::string::npos);
  CHECK(r.err.find("NOT CONVERGED") != std::string::npos);
}

TEST_CASE("installed executable honours the exit code contract") {
  const Scratch& s = scratch();
  const std::string exe = CHINPAINT_CLI_PATH;
  const std::string quiet = " 2>" + (s / "stderr.txt").string();
  const int ok = std::system((exe + " --image " + s.image.string() + " --mask " + s.mask.string() + " --eps1 0.1 --eps2 0.05" +
                              " --alpha 1e3 --alpha2 1e4 --tau 1e-4 --tol 1e-8 --out " + (s / "exe.pgm").string() + quiet)
                                 .c_str());
  CHECK(WEXITSTATUS(ok) == 0);
  CHECK(fs::exists(s / "exe.pgm"));
  const int missing = std::system((exe + " --image " + s.image.string() + quiet).c_str());
  CHECK(WEXITSTATUS(missing) == 2);
  CHECK(slurp(s / "stderr.txt").find("Usage") != std::string::npos);
}
