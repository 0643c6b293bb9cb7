// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0

#include "dgap/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <thread>
#include <vector>

#include "json.hpp"

#include "dgap/birman_schwinger.hpp"
#include "dgap/errors.hpp"
#include "dgap/gap_minmax.hpp"
#include "dgap/inequalities.hpp"
#include "dgap/multicenter.hpp"
#include "dgap/shooting.hpp"
#include "dgap/spinor_grid.hpp"
#include "dgap/trial_spinor.hpp"

namespace dgap {

namespace {

using nlohmann::json;

// All floating-point output goes through one shortest-unambiguous formatter so
// that a fixed seed reproduces byte-identical files.
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_u64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%llu", static_cast<unsigned long long>(v));
  return buf;
}

std::string csv_preamble(const RunConfig &cfg, const std::string &what,
                         const std::string &extras) {
  std::string h = "# gapwork " + cfg.command + ": " + what + "\n";
  h += "# config_hash=" + cfg.config_hash + " seed=" + fmt_u64(cfg.seed) + "\n";
  if (!extras.empty())
    h += "# " + extras + "\n";
  return h;
}

void write_text(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw ValidationError("BadOutputDir", "cannot open " + path.string() + " for writing");
  out << text;
}

json base_json(const RunConfig &cfg) {
  json j;
  j["command"] = cfg.command;
  j["config_hash"] = cfg.config_hash;
  j["seed"] = cfg.seed;
  return j;
}

json basis_json(const RadialBasisSpec &b) {
  json j;
  j["r_max"] = b.r_max;
  j["n_intervals"] = b.n_intervals;
  j["order"] = b.order;
  j["grading"] = b.grading;
  return j;
}

constexpr double kTixConstant = 1.1037083129209177; // (pi/2 + 2/pi) / 2

} // namespace

void parallel_for(int n, int threads, const std::function<void(int)> &fn) {
  if (n <= 0)
    return;
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i)
      fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n)
          return;
        try {
          fn(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (auto &th : pool)
    th.join();
  for (int i = 0; i < n; ++i)
    if (errors[static_cast<std::size_t>(i)])
      std::rethrow_exception(errors[static_cast<std::size_t>(i)]);
}

RunOutcome run_spectrum(const RunConfig &cfg, const std::string &out_dir, int threads) {
  (void)threads; // a handful of channels, each dominated by dense eigensolves
  if (!cfg.has_measure)
    throw ValidationError("MissingCharge", "spectrum needs at least one [[charge]] block");
  cfg.measure.validate(MeasureRegime::solver);
  if (!cfg.measure.is_radial())
    throw ValidationError("NotRadial",
                          "the radial solver needs all charge about one center; "
                          "multicenter geometries go through the pes command");
  if (cfg.kappa_list.empty())
    throw ValidationError("BadKappaList", "kappa_list must not be empty");
  if (cfg.levels < 1)
    throw ValidationError("BadLevelCount", "levels must be at least 1");

  const SpectrumResult res =
      spectrum_in_gap(cfg.measure, cfg.kappa_list, cfg.levels, cfg.tol, cfg.basis, cfg.cap);

  std::string extras = "tol=" + fmt(cfg.tol) + " gap_guard=" + fmt(kGapGuard) +
                       " r_max=" + fmt(cfg.basis.r_max) +
                       " n_intervals=" + std::to_string(cfg.basis.n_intervals) +
                       " order=" + std::to_string(cfg.basis.order) +
                       " grading=" + fmt(cfg.basis.grading);
  std::string csv = csv_preamble(cfg, "gap levels, ascending", extras);
  csv += "k,lambda,kappa,within_channel,degeneracy,residual,basis_dim\n";
  int k = 1;
  for (const MinMaxLevel &lvl : res.levels) {
    csv += std::to_string(k++) + "," + fmt(lvl.lambda) + "," + std::to_string(lvl.kappa) + "," +
           std::to_string(lvl.within_channel) + "," + std::to_string(lvl.degeneracy) + "," +
           fmt(lvl.residual) + "," + std::to_string(lvl.basis_dim) + "\n";
  }
  write_text(std::filesystem::path(out_dir) / "spectrum.csv", csv);

  json j = base_json(cfg);
  j["tolerances"]["tol"] = cfg.tol;
  j["tolerances"]["gap_guard"] = kGapGuard;
  j["basis"] = basis_json(cfg.basis);
  j["total_charge"] = cfg.measure.total_charge();
  if (cfg.cap)
    j["potential_cap"] = *cfg.cap;
  j["channels"] = json::array();
  for (const ChannelStatus &st : res.channels) {
    json c;
    c["kappa"] = st.kappa;
    c["requested"] = st.requested;
    c["found"] = st.found;
    c["error"] = st.error;
    j["channels"].push_back(c);
  }
  j["levels"] = json::array();
  for (const MinMaxLevel &lvl : res.levels) {
    json l;
    l["lambda"] = lvl.lambda;
    l["kappa"] = lvl.kappa;
    l["within_channel"] = lvl.within_channel;
    l["degeneracy"] = lvl.degeneracy;
    l["residual"] = lvl.residual;
    l["evaluations"] = lvl.evaluations;
    j["levels"].push_back(l);
  }

  if (!cfg.truncation_caps.empty()) {
    const TruncationSweep sweep = truncation_sweep(cfg.measure, cfg.kappa_list.front(), 1,
                                                   cfg.truncation_caps, cfg.tol, cfg.basis);
    std::string tcsv = csv_preamble(cfg, "lowest level under potential caps",
                                    "kappa=" + std::to_string(cfg.kappa_list.front()) +
                                        " uncapped=" + fmt(sweep.uncapped));
    tcsv += "cap,lambda,gap_to_uncapped\n";
    json tj = json::array();
    for (const TruncationPoint &pt : sweep.points) {
      tcsv += fmt(pt.cap) + "," + fmt(pt.lambda) + "," + fmt(pt.lambda - sweep.uncapped) + "\n";
      json e;
      e["cap"] = pt.cap;
      e["lambda"] = pt.lambda;
      tj.push_back(e);
    }
    write_text(std::filesystem::path(out_dir) / "truncation.csv", tcsv);
    j["truncation"]["points"] = tj;
    j["truncation"]["uncapped"] = sweep.uncapped;
  }
  write_text(std::filesystem::path(out_dir) / "spectrum.json", j.dump(2) + "\n");

  if (res.levels.empty()) {
    std::string why = "NoRootInGap";
    for (const ChannelStatus &st : res.channels)
      if (!st.error.empty()) {
        why = st.error;
        break;
      }
    throw SolverError(why, "no level found inside the gap for any requested channel");
  }
  char msg[160];
  std::snprintf(msg, sizeof(msg), "spectrum: %d level(s) in the gap, lowest lambda = %.12g",
                static_cast<int>(res.levels.size()), res.levels.front().lambda);
  return RunOutcome{0, msg};
}

RunOutcome run_oracle(const RunConfig &cfg, const std::string &out_dir, int threads) {
  (void)threads;
  if (!(cfg.oracle_nu > 0.0) || !(cfg.oracle_nu < 1.0))
    throw ValidationError("AtomTooHeavy", "oracle coupling must lie in (0, 1)");
  if (cfg.oracle_levels < 1)
    throw ValidationError("BadLevelCount", "oracle levels must be at least 1");
  if (cfg.oracle_kappas.empty())
    throw ValidationError("BadKappaList", "oracle kappa_list must not be empty");
  for (int kappa : cfg.oracle_kappas)
    if (kappa == 0)
      throw ValidationError("BadKappaList", "kappa = 0 is not a spin-orbit channel");

  ChargeMeasure point;
  point.add(PointCharge{Vec3::Zero(), cfg.oracle_nu});
  const RadialPotential pot = radial_potential(point);

  std::string csv = csv_preamble(cfg, "point-charge reference levels",
                                 "nu=" + fmt(cfg.oracle_nu));
  csv += "kappa,k,lambda_shooting,lambda_closed_form,diff\n";
  json rows = json::array();
  double worst = 0.0;
  for (int kappa : cfg.oracle_kappas) {
    const std::vector<double> shot = reference_levels(pot, kappa, cfg.oracle_levels);
    const std::vector<double> closed = point_charge_levels(cfg.oracle_nu, kappa, cfg.oracle_levels);
    for (int i = 0; i < cfg.oracle_levels; ++i) {
      const double diff = shot[static_cast<std::size_t>(i)] - closed[static_cast<std::size_t>(i)];
      worst = std::max(worst, std::abs(diff));
      csv += std::to_string(kappa) + "," + std::to_string(i + 1) + "," +
             fmt(shot[static_cast<std::size_t>(i)]) + "," +
             fmt(closed[static_cast<std::size_t>(i)]) + "," + fmt(diff) + "\n";
      json r;
      r["kappa"] = kappa;
      r["k"] = i + 1;
      r["lambda_shooting"] = shot[static_cast<std::size_t>(i)];
      r["lambda_closed_form"] = closed[static_cast<std::size_t>(i)];
      r["diff"] = diff;
      rows.push_back(r);
    }
  }
  write_text(std::filesystem::path(out_dir) / "oracle.csv", csv);

  json j = base_json(cfg);
  j["nu"] = cfg.oracle_nu;
  j["levels"] = rows;
  j["max_abs_diff"] = worst;
  write_text(std::filesystem::path(out_dir) / "oracle.json", j.dump(2) + "\n");

  char msg[128];
  std::snprintf(msg, sizeof(msg), "oracle: max |shooting - closed form| = %.3g", worst);
  return RunOutcome{0, msg};
}

RunOutcome run_bsnorm(const RunConfig &cfg, const std::string &out_dir, int threads) {
  (void)threads; // the FFT pipeline is memory bound on one honest core
  if (!cfg.has_measure)
    throw ValidationError("MissingCharge", "bsnorm needs at least one [[charge]] block");
  cfg.measure.validate(MeasureRegime::extension);

  const SpinorGrid grid(cfg.grid_n, cfg.grid_box);
  const BsOperator op(grid, cfg.measure, 0.0, cfg.grid_cap);
  const BsNormEstimate est = bs_norm_estimate(op, cfg.seed, cfg.iterations);

  const double mass = cfg.measure.total_variation();
  const double bound = kTixConstant * mass;

  std::string csv = csv_preamble(cfg, "Lanczos trace for the Birman-Schwinger norm",
                                 "N=" + std::to_string(cfg.grid_n) + " L=" + fmt(cfg.grid_box) +
                                     " cap=" + fmt(cfg.grid_cap) + " lambda=0");
  csv += "cycle,ritz_sqrt\n";
  for (std::size_t c = 0; c < est.trace.size(); ++c)
    csv += std::to_string(c + 1) + "," + fmt(std::sqrt(std::max(0.0, est.trace[c]))) + "\n";
  write_text(std::filesystem::path(out_dir) / "bsnorm.csv", csv);

  json j = base_json(cfg);
  j["grid"]["N"] = cfg.grid_n;
  j["grid"]["L"] = cfg.grid_box;
  j["grid"]["cap"] = cfg.grid_cap;
  j["lambda"] = 0.0;
  j["estimate"] = est.estimate;
  j["residual"] = est.residual;
  j["iterations"] = est.iterations;
  j["total_variation"] = mass;
  j["norm_constant"] = kTixConstant;
  j["norm_bound"] = bound;
  j["within_bound"] = est.estimate <= bound * 1.05;
  write_text(std::filesystem::path(out_dir) / "bsnorm.json", j.dump(2) + "\n");

  char msg[160];
  std::snprintf(msg, sizeof(msg),
                "bsnorm: estimate %.6g (bound %.6g, residual %.2g, %d applications)",
                est.estimate, bound, est.residual, est.iterations);
  return RunOutcome{0, msg};
}

RunOutcome run_pes(const RunConfig &cfg, const std::string &out_dir, int threads) {
  if (!cfg.molecule)
    throw ValidationError("MissingMolecule", "pes needs a [molecule] section");
  MoleculeSpec unit = *cfg.molecule;
  unit.validate();

  std::vector<double> ds = cfg.separations;
  if (ds.empty()) {
    // Default sweep: 20 points, log spaced from strong overlap to isolation.
    const double lo = 0.05, hi = 50.0;
    for (int i = 0; i < 20; ++i)
      ds.push_back(lo * std::pow(hi / lo, i / 19.0));
  }
  for (double d : ds)
    if (!(d > 0.0))
      throw ValidationError("BadSeparationList", "separations must be positive");

  PesOptions opts;
  opts.basis = cfg.mol_basis;
  opts.grid = cfg.mol_grid;
  opts.tol = cfg.pes_tol;

  std::vector<PesRecord> recs(ds.size());
  parallel_for(static_cast<int>(ds.size()), threads, [&](int i) {
    const std::vector<double> one{ds[static_cast<std::size_t>(i)]};
    recs[static_cast<std::size_t>(i)] = pes_sweep(unit, one, opts).front();
  });

  std::string csv = csv_preamble(cfg, "lowest gap level along the separation sweep",
                                 "tol=" + fmt(cfg.pes_tol) +
                                     " centers=" + std::to_string(unit.size()));
  csv += "d,lambda1,u_nuc,total,basis_dim,residual,status\n";
  std::string plot = "# gapwork pes plot data (block 1: d lambda1, block 2: d total)\n";
  std::string plot2;
  int ok = 0;
  json rows = json::array();
  for (const PesRecord &r : recs) {
    csv += fmt(r.d) + "," + fmt(r.lambda1) + "," + fmt(r.u_nuc) + "," + fmt(r.total) + "," +
           std::to_string(r.basis_dim) + "," + fmt(r.residual) + "," + r.status + "\n";
    if (r.status == "ok") {
      ++ok;
      plot += fmt(r.d) + " " + fmt(r.lambda1) + "\n";
      plot2 += fmt(r.d) + " " + fmt(r.total) + "\n";
    }
    json e;
    e["d"] = r.d;
    e["lambda1"] = r.lambda1;
    e["u_nuc"] = r.u_nuc;
    e["total"] = r.total;
    e["basis_dim"] = r.basis_dim;
    e["residual"] = r.residual;
    e["status"] = r.status;
    rows.push_back(e);
  }
  write_text(std::filesystem::path(out_dir) / "pes.csv", csv);
  write_text(std::filesystem::path(out_dir) / "pes.dat", plot + "\n\n" + plot2);

  const double nu_max = unit.max_weight();
  const double nu_sum = unit.total_weight();
  const double tix_threshold = 1.0 / kTixConstant; // 2 / (pi/2 + 2/pi)

  json j = base_json(cfg);
  j["separations"] = ds;
  j["nu_max"] = nu_max;
  j["nu_sum"] = nu_sum;
  j["limit_far"] = std::sqrt(1.0 - nu_max * nu_max);
  j["coalescence_limit_applicable"] = nu_sum <= tix_threshold;
  if (nu_sum < 1.0) {
    const double near = std::sqrt(1.0 - nu_sum * nu_sum);
    j["limit_near"] = near;
    double min_l1 = std::numeric_limits<double>::infinity();
    for (const PesRecord &r : recs)
      if (r.status == "ok")
        min_l1 = std::min(min_l1, r.lambda1);
    if (ok > 0)
      j["min_lambda1_minus_limit_near"] = min_l1 - near; // observation, never asserted
  } else {
    j["limit_near"] = nullptr;
  }
  j["points_ok"] = ok;
  j["points_total"] = static_cast<int>(ds.size());
  write_text(std::filesystem::path(out_dir) / "pes.json", j.dump(2) + "\n");

  char msg[160];
  std::snprintf(msg, sizeof(msg), "pes: %d/%d points converged", ok,
                static_cast<int>(ds.size()));
  if (5 * ok < 4 * static_cast<int>(ds.size()))
    return RunOutcome{3, std::string(msg) + " (below the 80% requirement)"};
  return RunOutcome{0, msg};
}

namespace {

struct VerifyRow {
  std::string inequality;
  int trial = 0;
  double margin = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::uint64_t seed = 0;
};

//! Seeded non-atomic radial measure (shells and uniform balls) for the
//! gradient-potential family.
ChargeMeasure random_radial_measure(std::uint64_t sd) {
  std::mt19937_64 rng(sd ^ 0x6a09e667f3bcc909ull);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  ChargeMeasure m;
  const int parts = 1 + static_cast<int>(rng() % 3u);
  for (int p = 0; p < parts; ++p) {
    const double radius = 0.05 * std::pow(120.0, u01(rng));
    const double w = (0.05 + 0.9 * u01(rng)) / parts;
    if (u01(rng) < 0.5)
      m.add(SphericalShell{Vec3::Zero(), w, radius});
    else
      m.add(make_uniform_ball(Vec3::Zero(), w, radius));
  }
  return m;
}

Vec3 random_in_ball(std::mt19937_64 &rng, double radius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    const Vec3 x(u(rng), u(rng), u(rng));
    if (x.squaredNorm() <= 1.0)
      return radius * x;
  }
}

} // namespace

RunOutcome run_verify(const RunConfig &cfg, const std::string &out_dir, int threads) {
  if (cfg.trials <= 0)
    throw ValidationError("BadTrialCount", "verify needs a positive trial count");
  if (cfg.localization_trials <= 0)
    throw ValidationError("BadTrialCount", "localization_trials must be positive");
  const int n = cfg.trials;
  const std::uint64_t s0 = cfg.seed;

  ChargeMeasure emb_mu;
  if (cfg.has_measure)
    emb_mu = cfg.measure;
  else
    emb_mu.add(PointCharge{Vec3::Zero(), 0.9});
  emb_mu.validate(MeasureRegime::solver);

  std::vector<VerifyRow> rows;
  auto family = [&](int count, const std::function<std::vector<VerifyRow>(int)> &one) {
    std::vector<std::vector<VerifyRow>> out(static_cast<std::size_t>(count));
    parallel_for(count, threads, [&](int i) { out[static_cast<std::size_t>(i)] = one(i); });
    for (auto &v : out)
      rows.insert(rows.end(), v.begin(), v.end());
  };
  auto seed_for = [s0](std::uint64_t fam, int trial) {
    return s0 + fam * 1000003ull + static_cast<std::uint64_t>(trial);
  };

  family(n, [&](int i) {
    const std::uint64_t sd = seed_for(1, i);
    const TrialSpinor phi = TrialSpinor::random(sd);
    const KatoCheck chk = kato_margin(phi, cfg.kato_constant);
    const double tol = 1e-8 * chk.norm2;
    return std::vector<VerifyRow>{{"kato", i, chk.margin, tol, chk.margin >= -tol, sd}};
  });

  const std::vector<double> hardy_as{0.0, 0.5, 1.0, 5.0};
  family(n, [&](int i) {
    const std::uint64_t sd = seed_for(2, i);
    const TrialSpinor phi = TrialSpinor::random(sd);
    const std::vector<HardyCheck> checks = hardy_dirac_margins(phi, hardy_as);
    std::vector<VerifyRow> v;
    for (const HardyCheck &c : checks) {
      char name[40];
      std::snprintf(name, sizeof(name), "hardy_a%g", c.a);
      const double tol = 1e-8 * c.h1_norm2;
      v.push_back({name, i, c.margin, tol, c.margin >= -tol, sd});
    }
    return v;
  });

  family(n, [&](int i) {
    const std::uint64_t sd = seed_for(3, i);
    const TrialSpinor phi = TrialSpinor::random(sd);
    const EmbeddingCheck c = vmu_norm_and_embedding(phi, &emb_mu);
    const double tol_lo = 1e-8 * std::max(1.0, c.vmu_norm2);
    const double tol_hi = 1e-10 * std::max(1.0, c.h1_norm2);
    return std::vector<VerifyRow>{
        {"embedding_lower", i, c.lower_margin, tol_lo, c.lower_margin >= -tol_lo, sd},
        {"embedding_upper", i, c.upper_margin, tol_hi, c.upper_margin >= -tol_hi, sd}};
  });

  const std::vector<double> grad_alphas{0.0, 0.25, 0.49};
  family(n, [&](int i) {
    const std::uint64_t sd = seed_for(4, i);
    const ChargeMeasure mu = random_radial_measure(sd);
    std::vector<VerifyRow> v;
    for (double alpha : grad_alphas) {
      const GradientPotentialCheck c = gradient_potential_check(mu, alpha);
      char name[40];
      std::snprintf(name, sizeof(name), "gradbound_a%g", alpha);
      const double tol = 1e-8 * c.bound;
      const double margin = c.bound - c.integral;
      v.push_back({name, i, margin, tol, margin >= -tol, sd});
    }
    return v;
  });

  family(n, [&](int i) {
    const std::uint64_t sd = seed_for(5, i);
    const TrialSpinor phi = TrialSpinor::random(sd);
    std::mt19937_64 rng(sd ^ 0x3c6ef372fe94f82bull);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const int bumps = 2 + static_cast<int>(rng() % 2u);
    std::vector<Vec3> centers;
    for (int b = 0; b < bumps; ++b)
      centers.push_back(random_in_ball(rng, 1.8));
    const double width = 0.5 + 0.8 * u01(rng);
    const SmoothPartition part(centers, width);
    const double res = ims_residual(phi, part, ims_sample_points(phi));
    const double tol = 1e-10;
    return std::vector<VerifyRow>{{"ims", i, tol - res, tol, res <= tol, sd}};
  });

  {
    MoleculeSpec pair;
    pair.centers = {Vec3(-0.5, 0.0, 0.0), Vec3(0.5, 0.0, 0.0)};
    pair.weights = {0.9, 0.9};
    const std::uint64_t sd_pair = seed_for(6, 0);
    const LocalizationCheck lc =
        localization_margins(pair, 0.0, cfg.localization_trials, sd_pair, cfg.mol_grid);
    for (std::size_t i = 0; i < lc.margins.size(); ++i)
      rows.push_back({"localization_pair", static_cast<int>(i), lc.margins[i], 1e-6,
                      lc.margins[i] >= -1e-6, sd_pair});

    MoleculeSpec single;
    single.centers = {Vec3::Zero()};
    single.weights = {0.9};
    const std::uint64_t sd_one = seed_for(7, 0);
    const LocalizationCheck lc1 =
        localization_margins(single, 0.0, cfg.localization_trials, sd_one, cfg.mol_grid);
    for (std::size_t i = 0; i < lc1.margins.size(); ++i)
      rows.push_back({"localization_single", static_cast<int>(i), lc1.margins[i], 1e-8,
                      lc1.margins[i] >= -1e-8, sd_one});
  }

  std::string csv = csv_preamble(cfg, "inequality margins over seeded trials",
                                 "trials=" + std::to_string(n) +
                                     " kato_constant=" + fmt(cfg.kato_constant));
  csv += "inequality,trial,margin,tolerance,pass\n";
  json jrows = json::array();
  const VerifyRow *first_fail = nullptr;
  int failures = 0;
  for (const VerifyRow &r : rows) {
    csv += r.inequality + "," + std::to_string(r.trial) + "," + fmt(r.margin) + "," +
           fmt(r.tolerance) + "," + (r.pass ? "1" : "0") + "\n";
    json e;
    e["inequality"] = r.inequality;
    e["trial"] = r.trial;
    e["margin"] = r.margin;
    e["tolerance"] = r.tolerance;
    e["pass"] = r.pass;
    e["seed"] = r.seed;
    jrows.push_back(e);
    if (!r.pass) {
      ++failures;
      if (first_fail == nullptr)
        first_fail = &r;
    }
  }
  write_text(std::filesystem::path(out_dir) / "verify.csv", csv);

  json j = base_json(cfg);
  j["trials"] = n;
  j["localization_trials"] = cfg.localization_trials;
  j["kato_constant"] = cfg.kato_constant;
  j["rows"] = jrows;
  j["failures"] = failures;
  write_text(std::filesystem::path(out_dir) / "verify.json", j.dump(2) + "\n");

  if (first_fail != nullptr) {
    char msg[240];
    std::snprintf(msg, sizeof(msg),
                  "verify: %d violation(s); first: %s trial %d seed %llu margin %.6g "
                  "(tolerance %.2g)",
                  failures, first_fail->inequality.c_str(), first_fail->trial,
                  static_cast<unsigned long long>(first_fail->seed), first_fail->margin,
                  first_fail->tolerance);
    return RunOutcome{4, msg};
  }
  char msg[120];
  std::snprintf(msg, sizeof(msg), "verify: %d margin rows, all nonnegative within tolerance",
                static_cast<int>(rows.size()));
  return RunOutcome{0, msg};
}

int run_command(const std::string &command, const std::string &config_path,
                const std::string &out_dir, std::optional<std::uint64_t> seed_override,
                int threads) {
  try {
    if (threads < 1)
      throw ValidationError("BadThreadCount", "--threads must be at least 1");
    RunConfig cfg = load_config(config_path, command);
    if (seed_override)
      cfg.seed = *seed_override;
    std::filesystem::create_directories(out_dir);
    RunOutcome out;
    if (command == "spectrum")
      out = run_spectrum(cfg, out_dir, threads);
    else if (command == "pes")
      out = run_pes(cfg, out_dir, threads);
    else if (command == "verify")
      out = run_verify(cfg, out_dir, threads);
    else if (command == "bsnorm")
      out = run_bsnorm(cfg, out_dir, threads);
    else if (command == "oracle")
      out = run_oracle(cfg, out_dir, threads);
    else
      throw ValidationError("BadCommand", "unknown subcommand " + command);
    if (!out.message.empty())
      std::printf("%s\n", out.message.c_str());
    return out.exit_code;
  } catch (const Error &e) {
    std::printf("error [%s]: %s\n", e.name().c_str(), e.what());
    return static_cast<int>(e.category());
  } catch (const std::exception &e) {
    std::printf("error: %s\n", e.what());
    return static_cast<int>(ErrorCategory::solver);
  }
}

} // namespace dgap
