// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance harness: one verdict line per criterion, exit 1 on any failure.
// Tolerances are pinned next to each check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dgap/birman_schwinger.hpp"
#include "dgap/charge_measure.hpp"
#include "dgap/gap_minmax.hpp"
#include "dgap/multicenter.hpp"
#include "dgap/runner.hpp"
#include "dgap/shooting.hpp"

#ifndef GAPWORK_BIN
#error "GAPWORK_BIN must point at the command-line binary"
#endif

#ifdef __unix__
#include <sys/wait.h>
#endif

namespace fs = std::filesystem;
using namespace dgap;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string num(double v, const char *spec = "%.3g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

ChargeMeasure point_measure(double nu) {
  ChargeMeasure m;
  m.add(PointCharge{Vec3::Zero(), nu});
  return m;
}

ChargeMeasure shell_measure(double nu, double radius) {
  ChargeMeasure m;
  m.add(SphericalShell{Vec3::Zero(), nu, radius});
  return m;
}

std::string slurp(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good())
    throw std::runtime_error("missing file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_binary(const std::string &args, const fs::path &log) {
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

struct Harness {
  std::map<int, std::string> lines;
  bool all_ok = true;

  void record(int n, bool ok, const std::string &detail) {
    lines[n] = "criterion " + std::to_string(n) + ": " +
               (ok ? "PASS" : "FAIL") + " - " + detail;
    all_ok = all_ok && ok;
    std::fprintf(stderr, "[acceptance] %s\n", lines[n].c_str());
  }

  template <typename Fn> void criterion(int n, Fn &&fn) {
    try {
      fn();
    } catch (const std::exception &e) {
      record(n, false, std::string("unexpected exception: ") + e.what());
    }
  }
};

} // namespace

int main() {
  Harness h;
  const fs::path scratch = fs::temp_directory_path() / "gapwork_acceptance";
  fs::remove_all(scratch);
  fs::create_directories(scratch);

  // 1. Ground-state exactness at defaults: point nu = 0.5, kappa = -1.
  h.criterion(1, [&] {
    const auto t0 = Clock::now();
    const double target = std::sqrt(1.0 - 0.25);
    const ChannelPencil pencil(point_measure(0.5), -1, RadialBasisSpec{});
    const MinMaxLevel lvl = find_level(pencil, 1, 1e-10);
    const double err = std::abs(lvl.lambda - target);
    const double wall = seconds_since(t0);
    h.record(1, err <= 1e-6 && wall <= 30.0,
             "lambda1 = " + num(lvl.lambda, "%.10f") + ", |err| = " + num(err) +
                 " (tol 1e-6), wall = " + num(wall) + " s (cap 30 s)");
  });

  // 2. Strong coupling nu = 0.9 plus the h-refinement curve.
  h.criterion(2, [&] {
    const double target = std::sqrt(1.0 - 0.81);
    const ChargeMeasure m = point_measure(0.9);
    const std::vector<int> ns = {25, 50, 100, 200};
    std::vector<double> errs;
    std::string curve;
    for (int n : ns) {
      RadialBasisSpec spec;
      spec.n_intervals = n;
      const ChannelPencil pencil(m, -1, spec);
      const double err = std::abs(find_level(pencil, 1, 1e-10).lambda - target);
      errs.push_back(err);
      curve += (curve.empty() ? "" : ", ") + std::to_string(n) + ": " + num(err);
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < errs.size(); ++i)
      decreasing = decreasing && errs[i] < errs[i - 1];
    h.record(2, decreasing && errs.back() <= 1e-4,
             "refinement errors {" + curve + "}, strictly decreasing = " +
                 (decreasing ? "yes" : "no") + ", final tol 1e-4");
  });

  // 3. Min-max vs shooting vs closed form, 5 levels per channel.
  h.criterion(3, [&] {
    // The k = 5 levels of kappa = +1 and kappa = -2 sit at principal number
    // n = 6; their classical turning point for nu = 0.3 is near r = 240, so
    // the domain must extend well past that for the Dirichlet cut to be
    // invisible at the 1e-6 tolerance.
    RadialBasisSpec fine;
    fine.r_max = 420.0;
    fine.n_intervals = 560;
    double worst_minmax = 0.0;
    double worst_shoot = 0.0;
    for (double nu : {0.3, 0.5}) {
      const ChargeMeasure m = point_measure(nu);
      const RadialPotential pot = radial_potential(m);
      for (int kappa : {-1, 1, -2}) {
        const std::vector<double> closed = point_charge_levels(nu, kappa, 5);
        const std::vector<double> shot = reference_levels(pot, kappa, 5);
        const ChannelPencil pencil(m, kappa, fine);
        for (int k = 1; k <= 5; ++k) {
          const MinMaxLevel lvl = find_level(pencil, k, 1e-10);
          worst_minmax = std::max(
              worst_minmax, std::abs(lvl.lambda - shot[static_cast<std::size_t>(k - 1)]));
          worst_shoot = std::max(
              worst_shoot, std::abs(shot[static_cast<std::size_t>(k - 1)] -
                                    closed[static_cast<std::size_t>(k - 1)]));
        }
      }
    }
    h.record(3, worst_minmax <= 1e-6 && worst_shoot <= 1e-9,
             "max |minmax - shooting| = " + num(worst_minmax) +
                 " (tol 1e-6), max |shooting - closed form| = " + num(worst_shoot) +
                 " (tol 1e-9), 30 levels");
  });

  // 4. Shell-to-point continuity.
  h.criterion(4, [&] {
    const double target = std::sqrt(1.0 - 0.25);
    std::vector<double> errs;
    std::string curve;
    for (double radius : {1.0, 0.1, 0.01, 0.001}) {
      const ChannelPencil pencil(shell_measure(0.5, radius), -1, RadialBasisSpec{});
      const double err = std::abs(find_level(pencil, 1, 1e-10).lambda - target);
      errs.push_back(err);
      curve += (curve.empty() ? "R=" : ", R=") + num(radius) + ": " + num(err);
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < errs.size(); ++i)
      decreasing = decreasing && errs[i] < errs[i - 1];
    h.record(4, decreasing && errs.back() <= 1e-3,
             "{" + curve + "}, strictly decreasing = " + (decreasing ? "yes" : "no") +
                 ", final tol 1e-3");
  });

  // 5. Truncation convergence of capped potentials.
  h.criterion(5, [&] {
    // For a point charge the capping shift at cap c scales like c^(-2*gamma)
    // with gamma = sqrt(1 - nu^2), so nu = 0.9 stalls near 1.6e-4 no matter
    // how fine the basis is. nu = 0.7 keeps the curve nontrivial while the
    // true shift at cap 1e4 sits far below the 1e-4 tolerance.
    const TruncationSweep sweep = truncation_sweep(
        point_measure(0.7), -1, 1, {10.0, 100.0, 1000.0, 10000.0}, 1e-10,
        RadialBasisSpec{});
    std::vector<double> gaps;
    std::string curve;
    for (const TruncationPoint &p : sweep.points) {
      gaps.push_back(std::abs(p.lambda - sweep.uncapped));
      curve += (curve.empty() ? "cap " : ", cap ") + num(p.cap, "%.0f") + ": " +
               num(gaps.back());
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < gaps.size(); ++i)
      decreasing = decreasing && gaps[i] < gaps[i - 1];
    h.record(5, decreasing && gaps.back() <= 1e-4,
             "{" + curve + "} vs uncapped " + num(sweep.uncapped, "%.8f") +
                 ", final tol 1e-4");
  });

  // 6. Sign condition for total mass 0.9.
  h.criterion(6, [&] {
    std::vector<ChargeMeasure> measures;
    auto mk = [&](std::vector<ChargeComponent> cs) {
      ChargeMeasure m;
      for (auto &c : cs)
        m.add(std::move(c));
      measures.push_back(std::move(m));
    };
    const Vec3 o = Vec3::Zero();
    mk({PointCharge{o, 0.9}});
    mk({SphericalShell{o, 0.9, 0.5}});
    mk({make_uniform_ball(o, 0.9, 1.2)});
    mk({PointCharge{o, 0.45}, SphericalShell{o, 0.45, 0.8}});
    mk({PointCharge{o, 0.3}, SphericalShell{o, 0.3, 0.2}, make_uniform_ball(o, 0.3, 1.0)});
    mk({SphericalShell{o, 0.45, 0.1}, SphericalShell{o, 0.45, 0.6}});
    mk({PointCharge{o, 0.45}, make_uniform_ball(o, 0.45, 0.05)});
    mk({SphericalShell{o, 0.3, 1.0}, make_uniform_ball(o, 0.6, 0.4)});
    mk({PointCharge{o, 0.6}, make_uniform_ball(o, 0.3, 2.0)});
    mk({SphericalShell{o, 0.2, 0.05}, SphericalShell{o, 0.2, 0.5}, PointCharge{o, 0.5}});

    double min_level = 1.0;
    int computed = 0;
    bool every_measure_has_levels = true;
    for (const ChargeMeasure &m : measures) {
      if (std::abs(m.total_charge() - 0.9) > 1e-12)
        throw std::runtime_error("acceptance bug: measure mass is not 0.9");
      const SpectrumResult res =
          spectrum_in_gap(m, {-1, 1}, 2, 1e-8, RadialBasisSpec{});
      if (res.levels.empty())
        every_measure_has_levels = false;
      for (const MinMaxLevel &lvl : res.levels) {
        min_level = std::min(min_level, lvl.lambda);
        ++computed;
      }
    }
    h.record(6, every_measure_has_levels && min_level >= -1e-8,
             std::to_string(computed) + " levels over 10 measures, min level = " +
                 num(min_level, "%.6f") + " (bound -1e-8)");
  });

  // 7. Two-center limits and the 20-point separation sweep.
  h.criterion(7, [&] {
    const auto t0 = Clock::now();
    MoleculeSpec unit;
    unit.centers = {Vec3(0.0, 0.0, 0.0), Vec3(1.0, 0.0, 0.0)};
    unit.weights = {0.45, 0.45};
    const int n_points = 20;
    const double lo = 0.05, hi = 50.0;
    std::vector<double> seps(n_points);
    for (int i = 0; i < n_points; ++i)
      seps[static_cast<std::size_t>(i)] =
          lo * std::pow(hi / lo, static_cast<double>(i) / (n_points - 1));
    std::vector<PesRecord> recs(n_points);
    PesOptions opts;
    parallel_for(n_points, 8, [&](int i) {
      recs[static_cast<std::size_t>(i)] =
          pes_sweep(unit, {seps[static_cast<std::size_t>(i)]}, opts).at(0);
    });
    int ok_points = 0;
    for (const PesRecord &r : recs)
      if (r.status == "ok")
        ++ok_points;
    const double far_limit = std::sqrt(1.0 - 0.45 * 0.45);
    const double near_limit = std::sqrt(1.0 - 0.81);
    const double far_err = std::abs(recs.back().lambda1 - far_limit);
    const double near_err = std::abs(recs.front().lambda1 - near_limit);
    const double wall = seconds_since(t0);
    h.record(7,
             ok_points == n_points && far_err <= 2e-2 && near_err <= 2e-2 &&
                 wall <= 900.0,
             "lambda1(50) err = " + num(far_err) + ", lambda1(0.05) err = " +
                 num(near_err) + " (tol 2e-2), " + std::to_string(ok_points) +
                 "/20 points ok, wall = " + num(wall) + " s (cap 900 s)");
  });

  // 9. Inequality suite at the shipped defaults (>= 100 trials per family).
  h.criterion(9, [&] {
    const auto t0 = Clock::now();
    RunConfig cfg; // defaults: trials = 120, localization_trials = 110
    cfg.command = "verify";
    const fs::path out = scratch / "verify";
    fs::create_directories(out);
    const RunOutcome outcome = run_verify(cfg, out.string(), 1);
    const double wall = seconds_since(t0);

    std::map<std::string, int> per_family;
    std::istringstream csv(slurp(out / "verify.csv"));
    std::string line;
    while (std::getline(csv, line)) {
      if (line.empty() || line[0] == '#' || line.rfind("inequality,", 0) == 0)
        continue;
      per_family[line.substr(0, line.find(','))]++;
    }
    const std::vector<std::string> required = {
        "kato",          "hardy_a0",      "hardy_a0.5",
        "hardy_a1",      "hardy_a5",      "embedding_lower",
        "embedding_upper", "gradbound_a0", "gradbound_a0.25",
        "gradbound_a0.49", "ims",          "localization_pair",
        "localization_single"};
    int families_ok = 0;
    for (const std::string &fam : required)
      if (per_family[fam] >= 100)
        ++families_ok;
    h.record(9,
             outcome.exit_code == 0 &&
                 families_ok == static_cast<int>(required.size()) && wall <= 600.0,
             "exit " + std::to_string(outcome.exit_code) + ", " +
                 std::to_string(families_ok) + "/" +
                 std::to_string(required.size()) +
                 " families with >= 100 trials, zero violations, wall = " +
                 num(wall) + " s (cap 600 s)");
  });

  // 10. Birman-Schwinger fixed point and norm bound.
  h.criterion(10, [&] {
    const ChargeMeasure shell = shell_measure(0.8, 1.0);
    const ChannelPencil pencil(shell, -1, RadialBasisSpec{});
    const double lambda1 = find_level(pencil, 1, 1e-10).lambda;
    const SpinorGrid grid(64, 30.0);
    const BsOperator at_level(grid, shell, lambda1, 1e4);
    const BsEigenCheck chk = bs_eigen_check(at_level, 1, 600);

    const double bound = 1.1037083129209177 * 0.9 * 1.05;
    double worst_norm = 0.0;
    std::vector<ChargeMeasure> mass09;
    mass09.push_back(shell_measure(0.9, 1.0));
    {
      ChargeMeasure m;
      m.add(make_uniform_ball(Vec3::Zero(), 0.9, 1.5));
      mass09.push_back(std::move(m));
    }
    {
      ChargeMeasure m;
      m.add(SphericalShell{Vec3::Zero(), 0.45, 0.5});
      m.add(make_uniform_ball(Vec3::Zero(), 0.45, 2.0));
      mass09.push_back(std::move(m));
    }
    for (const ChargeMeasure &m : mass09) {
      const BsOperator at_zero(grid, m, 0.0, 1e4);
      worst_norm = std::max(worst_norm, bs_norm_estimate(at_zero, 1, 600).estimate);
    }
    h.record(10, chk.defect <= 5e-2 && worst_norm <= bound,
             "|eig - 1| = " + num(chk.defect) + " at lambda1 = " +
                 num(lambda1, "%.6f") + " (tol 5e-2); max norm estimate = " +
                 num(worst_norm, "%.4f") + " <= " + num(bound, "%.4f"));
  });

  // 11. Bit-identical CSV outputs under a fixed seed, via the binary.
  h.criterion(11, [&] {
    const fs::path dir = scratch / "determinism";
    fs::create_directories(dir);
    std::ofstream cfg(dir / "run.toml");
    cfg << "[[charge]]\nkind = \"point\"\nweight = 0.5\n"
        << "[radial]\nkappa_list = [-1, 1]\n[solver]\nlevels = 2\n";
    cfg.close();
    std::ofstream ocfg(dir / "oracle.toml");
    ocfg << "[oracle]\nnu = 0.5\nkappa_list = [-1, -2]\nlevels = 3\n";
    ocfg.close();

    const std::string spectrum_args = "spectrum --config " +
                                      (dir / "run.toml").string() + " --out ";
    const std::string oracle_args = "oracle --config " +
                                    (dir / "oracle.toml").string() + " --out ";
    bool codes_ok = true;
    codes_ok &= run_binary(spectrum_args + (dir / "a").string(), dir / "log1.txt") == 0;
    codes_ok &= run_binary(spectrum_args + (dir / "b").string(), dir / "log2.txt") == 0;
    codes_ok &= run_binary(oracle_args + (dir / "oa").string(), dir / "log3.txt") == 0;
    codes_ok &= run_binary(oracle_args + (dir / "ob").string(), dir / "log4.txt") == 0;
    const bool spectrum_same =
        slurp(dir / "a" / "spectrum.csv") == slurp(dir / "b" / "spectrum.csv");
    const bool oracle_same =
        slurp(dir / "oa" / "oracle.csv") == slurp(dir / "ob" / "oracle.csv");
    h.record(11, codes_ok && spectrum_same && oracle_same,
             std::string("spectrum.csv identical = ") +
                 (spectrum_same ? "yes" : "no") + ", oracle.csv identical = " +
                 (oracle_same ? "yes" : "no"));
  });

  // 8. Monotonicity audits, evaluated after every solver run above.
  h.criterion(8, [&] {
    const long count = monotonicity_violation_count();
    h.record(8, count == 0,
             "NonMonotoneDetected count = " + std::to_string(count) +
                 " across the whole suite");
  });

  for (int n = 1; n <= 11; ++n) {
    if (!h.lines.count(n)) {
      h.record(n, false, "criterion did not run");
    }
    std::printf("%s\n", h.lines[n].c_str());
  }
  return h.all_ok ? 0 : 1;
}
