// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

#ifndef GAPWORK_BIN
#error "GAPWORK_BIN must point at the command-line binary"
#endif

#ifdef __unix__
#include <sys/wait.h>
#endif

namespace fs = std::filesystem;

namespace {

fs::path scratch_root() {
  static const fs::path root = [] {
    fs::path p = fs::temp_directory_path() / "gapwork_cli_test";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return root;
}

void write_file(const fs::path &path, const std::string &text) {
  std::ofstream out(path);
  REQUIRE(out.good());
  out << text;
}

std::string slurp(const fs::path &path) {
  std::ifstream in(path);
  REQUIRE_MESSAGE(in.good(), "missing file: ", path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string &args, const fs::path &log) {
  const std::string cmd =
      std::string(GAPWORK_BIN) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
#ifdef __unix__
  if (WIFEXITED(status))
    return WEXITSTATUS(status);
  return -1;
#else
  return status;
#endif
}

const std::string kFastSpectrum = "[[charge]]\n"
                                  "kind = \"point\"\n"
                                  "weight = 0.5\n"
                                  "[radial]\n"
                                  "r_max = 30\n"
                                  "n_intervals = 60\n"
                                  "kappa_list = [-1]\n"
                                  "[solver]\n"
                                  "levels = 1\n";

} // namespace

TEST_CASE("oracle subcommand writes the closed-form table") {
  const fs::path dir = scratch_root() / "oracle";
  fs::create_directories(dir);
  write_file(dir / "run.toml", "[oracle]\n"
                               "nu = 0.5\n"
                               "kappa_list = [-1]\n"
                               "levels = 2\n");
  const int code = run_cli("oracle --config " + (dir / "run.toml").string() +
                               " --out " + (dir / "out").string(),
                           dir / "log.txt");
  CHECK(code == 0);
  const std::string csv = slurp(dir / "out" / "oracle.csv");
  CHECK(csv.find("0.8660254037844386") != std::string::npos);
  CHECK(csv.find("0.965925826289068") != std::string::npos);
  const std::string json = slurp(dir / "out" / "oracle.json");
  CHECK(json.find("max_abs_diff") != std::string::npos);
}

TEST_CASE("overcritical charge exits with the validation code") {
  const fs::path dir = scratch_root() / "heavy";
  fs::create_directories(dir);
  write_file(dir / "run.toml", "[[charge]]\n"
                               "kind = \"point\"\n"
                               "weight = 1.0\n");
  const int code = run_cli("spectrum --config " + (dir / "run.toml").string() +
                               " --out " + (dir / "out").string(),
                           dir / "log.txt");
  CHECK(code == 2);
  CHECK(slurp(dir / "log.txt").find("AtomTooHeavy") != std::string::npos);
}

TEST_CASE("zero-mass charge exits with the validation code") {
  const fs::path dir = scratch_root() / "trivial";
  fs::create_directories(dir);
  write_file(dir / "run.toml", "[[charge]]\n"
                               "kind = \"point\"\n"
                               "weight = 0.0\n");
  const int code = run_cli("spectrum --config " + (dir / "run.toml").string() +
                               " --out " + (dir / "out").string(),
                           dir / "log.txt");
  CHECK(code == 2);
  CHECK(slurp(dir / "log.txt").find("TrivialMeasure") != std::string::npos);
}

TEST_CASE("coincident centers are rejected before the sweep") {
  const fs::path dir = scratch_root() / "coincident";
  fs::create_directories(dir);
  write_file(dir / "run.toml", "[molecule]\n"
                               "centers = [[0, 0, 0], [0, 0, 0]]\n"
                               "weights = [0.45, 0.45]\n"
                               "[pes]\n"
                               "separations = [1.0]\n");
  const int code = run_cli("pes --config " + (dir / "run.toml").string() +
                               " --out " + (dir / "out").string(),
                           dir / "log.txt");
  CHECK(code == 2);
  CHECK(slurp(dir / "log.txt").find("BadMolecule") != std::string::npos);
}

TEST_CASE("unknown config keys are rejected") {
  const fs::path dir = scratch_root() / "badkey";
  fs::create_directories(dir);
  write_file(dir / "run.toml", "[solver]\nlevles = 3\n");
  const int code = run_cli("spectrum --config " + (dir / "run.toml").string() +
                               " --out " + (dir / "out").string(),
                           dir / "log.txt");
  CHECK(code == 2);
  CHECK(slurp(dir / "log.txt").find("BadConfigKey") != std::string::npos);
}

TEST_CASE("zero verify trials are rejected") {
  const fs::path dir = scratch_root() / "zerotrials";
  fs::create_directories(dir);
  write_file(dir / "run.toml", "[verify]\ntrials = 0\n");
  const int code = run_cli("verify --config " + (dir / "run.toml").string() +
                               " --out " + (dir / "out").string(),
                           dir / "log.txt");
  CHECK(code == 2);
  CHECK(slurp(dir / "log.txt").find("BadTrialCount") != std::string::npos);
}

TEST_CASE("an understated constant makes verification fail") {
  const fs::path dir = scratch_root() / "katohook";
  fs::create_directories(dir);
  write_file(dir / "run.toml", "[verify]\n"
                               "trials = 40\n"
                               "localization_trials = 1\n"
                               "kato_constant = 1.0\n");
  const int code = run_cli("verify --config " + (dir / "run.toml").string() +
                               " --out " + (dir / "out").string(),
                           dir / "log.txt");
  CHECK(code == 4);
  const std::string log = slurp(dir / "log.txt");
  CHECK(log.find("kato") != std::string::npos);
  const std::string csv = slurp(dir / "out" / "verify.csv");
  CHECK(csv.find("kato,") != std::string::npos);
}

TEST_CASE("fixed seeds reproduce byte-identical outputs") {
  const fs::path dir = scratch_root() / "determinism";
  fs::create_directories(dir);
  write_file(dir / "run.toml", kFastSpectrum);
  const std::string base = "spectrum --config " + (dir / "run.toml").string();
  CHECK(run_cli(base + " --out " + (dir / "a").string(), dir / "log_a.txt") == 0);
  CHECK(run_cli(base + " --out " + (dir / "b").string(), dir / "log_b.txt") == 0);
  CHECK(run_cli(base + " --out " + (dir / "c").string() + " --threads 3",
                dir / "log_c.txt") == 0);
  const std::string a = slurp(dir / "a" / "spectrum.csv");
  CHECK(a == slurp(dir / "b" / "spectrum.csv"));
  CHECK(a == slurp(dir / "c" / "spectrum.csv"));
  CHECK(slurp(dir / "a" / "spectrum.json") == slurp(dir / "b" / "spectrum.json"));
  CHECK(a.find("lambda") != std::string::npos);
  CHECK(a.find("0.8660") != std::string::npos);
}

TEST_CASE("the seed flag overrides the config seed") {
  const fs::path dir = scratch_root() / "seedflag";
  fs::create_directories(dir);
  write_file(dir / "run.toml", kFastSpectrum);
  const int code = run_cli("spectrum --config " + (dir / "run.toml").string() +
                               " --out " + (dir / "out").string() + " --seed 9",
                           dir / "log.txt");
  CHECK(code == 0);
  CHECK(slurp(dir / "out" / "spectrum.csv").find("seed=9") != std::string::npos);
}

TEST_CASE("usage errors do not look like run results") {
  const fs::path dir = scratch_root() / "usage";
  fs::create_directories(dir);
  CHECK(run_cli("", dir / "log1.txt") != 0);
  CHECK(run_cli("spectrum --config /nonexistent/run.toml --out " +
                    (dir / "out").string(),
                dir / "log2.txt") != 0);
  CHECK(run_cli("frobnicate", dir / "log3.txt") != 0);
  write_file(dir / "run.toml", kFastSpectrum);
  CHECK(run_cli("spectrum --config " + (dir / "run.toml").string() +
                    " --out " + (dir / "out").string() + " --threads 0",
                dir / "log4.txt") != 0);
}
