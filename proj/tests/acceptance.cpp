// Acceptance suite: runs every criterion at its pinned tolerance and prints
// one PASS/FAIL line per criterion.  Exit code is the number of failures.
//
// Usage: tcd_acceptance [--tcd-sim PATH]
//   PATH points at the built CLI binary; criterion 10 (end-to-end CLI
//   determinism) fails with an explanation when it is missing.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tcd/scenario.hpp"
#include "tcd/validation.hpp"

namespace fs = std::filesystem;

namespace {

int run_command(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> dir_contents(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    files[entry.path().filename().string()] = slurp(entry.path());
  }
  return files;
}

tcd::validation::CheckResult check_cli_determinism(const std::string& tcd_sim) {
  using Clock = std::chrono::steady_clock;
  tcd::validation::CheckResult result;
  result.name = "CLI determinism: identical outputs for identical config and seed";
  const auto t0 = Clock::now();

  if (tcd_sim.empty()) {
    result.detail = "tcd-sim path not provided (pass --tcd-sim PATH)";
    result.seconds = 0.0;
    return result;
  }

  const fs::path work =
      fs::temp_directory_path() / ("tcd_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(work);
  fs::create_directories(work);

  // A config that exercises every output, Monte Carlo included.
  tcd::ScenarioConfig cfg = tcd::default_config();
  cfg.grid = tcd::make_screen_grid(-0.002, 0.002, 101);
  cfg.environment = tcd::IntensityMixture::make(0.3);
  tcd::MonteCarloSpec mc;
  mc.config.samples = 200'000;
  mc.config.seed = 7;
  mc.config.bins = 64;
  mc.config.resolution = 256;
  mc.workers = 2;
  cfg.montecarlo = mc;
  const fs::path cfg_path = work / "config.json";
  {
    std::ofstream f(cfg_path, std::ios::binary);
    f << tcd::config_to_json_text(cfg);
  }

  // Both runs use the byte-identical command line; the first result set is
  // moved aside in between.
  const fs::path out_dir = work / "out";
  const fs::path out_a = work / "first_run";
  const std::string base = "'" + tcd_sim + "' run --config '" + cfg_path.string() + "' --out '" +
                           out_dir.string() + "'";
  const int rc_a = run_command(base + " > /dev/null");
  if (rc_a == 0) fs::rename(out_dir, out_a);
  const int rc_b = run_command(base + " > /dev/null");
  const fs::path out_b = out_dir;

  bool identical = rc_a == 0 && rc_b == 0;
  std::string mismatch;
  if (identical) {
    const auto files_a = dir_contents(out_a);
    const auto files_b = dir_contents(out_b);
    identical = files_a.size() == files_b.size() && !files_a.empty();
    for (const auto& [name, content] : files_a) {
      if (!files_b.count(name) || files_b.at(name) != content) {
        identical = false;
        mismatch = name;
        break;
      }
    }
  }

  const int rc_validate = run_command("'" + tcd_sim + "' validate --config '" +
                                      cfg_path.string() + "' > /dev/null");
  fs::remove_all(work);

  result.passed = identical && rc_validate == 0;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "run exits %d/%d, outputs byte-identical: %s%s%s; validate exits %d (want 0)",
                rc_a, rc_b, identical ? "yes" : "no", mismatch.empty() ? "" : ", first diff: ",
                mismatch.c_str(), rc_validate);
  result.detail = buf;
  result.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return result;
}

}  // namespace

int main(int argc, char** argv) {
  std::string tcd_sim;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--tcd-sim") tcd_sim = argv[i + 1];
  }

  std::vector<tcd::validation::CheckResult> results = tcd::validation::run_all();
  results.push_back(check_cli_determinism(tcd_sim));

  int failures = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    if (!r.passed) ++failures;
    std::printf("[%s] criterion %zu: %s — %s (%.2f s)\n", r.passed ? "PASS" : "FAIL", i + 1,
                r.name.c_str(), r.detail.c_str(), r.seconds);
  }
  std::printf("%zu/%zu acceptance criteria passed\n", results.size() - failures, results.size());
  return failures;
}
