// End-to-end checks of the command line tool, driven through the shell.
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct CmdResult {
  int exit_code;
  std::string output;
};

CmdResult run_cmd(const std::string& args) {
  std::string cmd = std::string(TIRFUZZ_BIN) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[512];
  while (size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

fs::path work_dir() {
  fs::path dir = fs::temp_directory_path() / "tirfuzz-cli-test";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("cli: the full analyze/prune/run/fuzz/replay/report loop") {
  fs::path dir = work_dir();
  std::string d = dir.string();

  CHECK(run_cmd("corpus emit fig1-netcdf-like --out " + d).exit_code == 0);
  fs::path prog = dir / "fig1-netcdf-like.tir";

  CmdResult an = run_cmd("analyze --program " + prog.string() +
                         " --targets t1 --emit-marked " + d +
                         "/marked.tir --emit-report " + d + "/report.json");
  CHECK(an.exit_code == 0);
  CHECK(fs::exists(dir / "marked.tir"));

  CmdResult pr = run_cmd("prune --in " + d + "/marked.tir --out " + d +
                         "/pruned.tir --stats " + d + "/stats.json");
  CHECK(pr.exit_code == 0);

  CmdResult rn =
      run_cmd("run --program " + d + "/pruned.tir --input hex:7fff01 --json");
  CHECK(rn.exit_code == 0);
  CHECK(rn.output.find("bug_triggered") != std::string::npos);

  CmdResult fz = run_cmd("fuzz --program " + prog.string() +
                         " --targets t1 --mode pruning --budget-steps 100000 "
                         "--rng-seed 1 --out " +
                         d + "/campaign.json --corpus-dir " + d + "/corpus");
  CHECK(fz.exit_code == 0);

  CmdResult rp = run_cmd("replay --corpus " + d + "/corpus --marked " + d +
                         "/marked.tir --report " + d + "/replay.json");
  CHECK(rp.exit_code == 0);

  CmdResult cmp = run_cmd("report --compare " + d + "/replay.json " + d +
                          "/replay.json --format table");
  CHECK(cmp.exit_code == 0);
  CHECK(cmp.output.find("tie") != std::string::npos);
}

TEST_CASE("cli: unknown target ids exit with the validation code and name the id") {
  fs::path dir = work_dir();
  std::string d = dir.string();
  run_cmd("corpus emit multi-target --out " + d);
  CmdResult r = run_cmd("analyze --program " + d +
                        "/multi-target.tir --targets bogus --emit-report " + d +
                        "/x.json");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("bogus") != std::string::npos);
}

TEST_CASE("cli: usage errors exit with code 1") {
  CHECK(run_cmd("frobnicate").exit_code == 1);
  CHECK(run_cmd("analyze --no-such-flag").exit_code == 1);
  CHECK(run_cmd("run --program /does/not/exist.tir").exit_code == 1);
}

TEST_CASE("cli: corpus manifests catch program mismatches") {
  fs::path dir = work_dir() / "mismatch";
  fs::create_directories(dir);
  std::string d = dir.string();
  run_cmd("corpus emit fig2-giflib-like --out " + d);
  run_cmd("corpus emit multi-target --out " + d);
  CHECK(run_cmd("analyze --program " + d +
                "/multi-target.tir --targets t_a,t_b --emit-marked " + d +
                "/mt_marked.tir")
            .exit_code == 0);
  CHECK(run_cmd("fuzz --program " + d +
                "/fig2-giflib-like.tir --targets t_leak --mode plain "
                "--budget-steps 20000 --corpus-dir " +
                d + "/corpus --out " + d + "/c.json")
            .exit_code == 0);
  CmdResult r = run_cmd("replay --corpus " + d + "/corpus --marked " + d +
                        "/mt_marked.tir --report " + d + "/r.json");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("manifest") != std::string::npos);
}

TEST_CASE("cli: fuzz output is byte-identical across reruns") {
  fs::path dir = work_dir();
  std::string d = dir.string();
  run_cmd("corpus emit deep-call-chain --out " + d);
  std::string base = "fuzz --program " + d +
                     "/deep-call-chain.tir --targets t_deep --mode "
                     "minimization --budget-steps 60000 --rng-seed 4 --out ";
  CHECK(run_cmd(base + d + "/r1.json").exit_code == 0);
  CHECK(run_cmd(base + d + "/r2.json").exit_code == 0);
  CHECK(slurp(dir / "r1.json") == slurp(dir / "r2.json"));
  CHECK(!slurp(dir / "r1.json").empty());
}
