// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0

#include "dgap/shooting.hpp"

#include <algorithm>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <map>

#include "dgap/errors.hpp"

namespace dgap {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::array<double, 2>; // (f, g)

struct RadialRhs {
  const RadialPotential *pot;
  int kappa;
  double E;

  void operator()(const State &x, State &dxdt, double r) const {
    const double V = pot->V(r);
    dxdt[0] = -(kappa / r) * x[0] + (1.0 + E + V) * x[1];
    dxdt[1] = (kappa / r) * x[1] - (E - 1.0 + V) * x[0];
  }
};

//! Power-series start f = sum a_k r^(gamma+k) against the Coulomb singularity
//! nu/r plus constant bounded rest; overall factor r^gamma dropped (the system
//! is linear, only the ray matters, and the sign of f is preserved).
State coulomb_series_start(double nu, int kappa, double e_shifted, double r0) {
  const double gk2 = static_cast<double>(kappa) * kappa - nu * nu;
  if (gk2 <= 0.0)
    throw SolverError("SingularStart",
                      "no power-series start: atom weight reaches the channel threshold");
  const double gamma = std::sqrt(gk2);
  constexpr int kTerms = 16;
  double a = 1.0, b = (gamma + kappa) / nu;
  double f = a, g = b, rp = 1.0;
  for (int k = 1; k <= kTerms; ++k) {
    const double det = k * (2.0 * gamma + k);
    const double r1 = (1.0 + e_shifted) * b;
    const double r2 = (1.0 - e_shifted) * a;
    const double ak = ((gamma + k - kappa) * r1 + nu * r2) / det;
    const double bk = (-nu * r1 + (gamma + k + kappa) * r2) / det;
    a = ak;
    b = bk;
    rp *= r0;
    f += a * rp;
    g += b * rp;
  }
  return {f, g};
}

//! Regular start for a bounded potential: leading powers of the free problem
//! with the constant potential shift absorbed into the energy.
State regular_series_start(int kappa, double e_shifted, double r0) {
  if (kappa < 0) {
    const double f = std::pow(r0, -kappa);
    const double g = (1.0 - e_shifted) / (1.0 - 2.0 * kappa) * std::pow(r0, 1 - kappa);
    return {f, g};
  }
  const double g = std::pow(r0, kappa);
  const double f = (1.0 + e_shifted) / (2.0 * kappa + 1.0) * std::pow(r0, kappa + 1);
  return {f, g};
}

struct SweepResult {
  State state;
  int nodes = 0;
};

//! Integrates from r_a to r_b (either direction), renormalizing between
//! chunks, counting f sign changes and optionally collecting (r, f) samples.
SweepResult sweep(const RadialPotential &pot, int kappa, double E, State start, double r_a,
                  double r_b, double rel_tol, std::vector<std::pair<double, double>> *samples) {
  RadialRhs rhs{&pot, kappa, E};
  const bool forward = r_b > r_a;

  std::vector<double> edges = {r_a, r_b};
  for (double t : pot.breakpoints)
    if (t > std::min(r_a, r_b) && t < std::max(r_a, r_b))
      edges.push_back(t);
  std::sort(edges.begin(), edges.end());
  if (!forward)
    std::reverse(edges.begin(), edges.end());

  const double k_rate = std::sqrt(std::max(1e-8, 1.0 - E * E));
  const double chunk = std::max(1.0, 10.0 / k_rate);

  SweepResult res;
  res.state = start;
  double f_prev_sign = start[0];

  auto stepper =
      odeint::make_controlled(1e-14, rel_tol, odeint::runge_kutta_fehlberg78<State>());
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    double from = edges[e];
    const double to = edges[e + 1];
    while (from != to) {
      double next = forward ? std::min(from + chunk, to) : std::max(from - chunk, to);
      auto observer = [&](const State &x, double r) {
        if (samples)
          samples->emplace_back(r, x[0]);
        if (x[0] != 0.0 && f_prev_sign != 0.0 && std::signbit(x[0]) != std::signbit(f_prev_sign))
          ++res.nodes;
        if (x[0] != 0.0)
          f_prev_sign = x[0];
      };
      const double h0 = (forward ? 1.0 : -1.0) * std::max(1e-10, 1e-3 * std::abs(next - from));
      odeint::integrate_adaptive(stepper, rhs, res.state, from, next, h0, observer);
      if (!std::isfinite(res.state[0]) || !std::isfinite(res.state[1]))
        throw SolverError("BlowUp", "radial integration overflowed");
      const double scale = std::max(std::abs(res.state[0]), std::abs(res.state[1]));
      if (scale > 1e50 || (scale > 0.0 && scale < 1e-50)) {
        res.state[0] /= scale;
        res.state[1] /= scale;
        f_prev_sign = res.state[0];
        if (samples)
          for (auto &s : *samples)
            s.second /= scale;
      }
      from = next;
    }
  }
  return res;
}

double far_radius(const RadialPotential &pot, double E) {
  const double k_rate = std::sqrt(std::max(1e-10, 1.0 - E * E));
  double r_far = 2.0 * std::max(40.0, 15.0 / k_rate);
  return std::max(r_far, 1.5 * pot.outermost + 20.0);
}

double outward_start_radius(const RadialPotential &pot) {
  double r0 = pot.atom_weight != 0.0 ? 1e-4 : 1e-5;
  if (!pot.breakpoints.empty())
    r0 = std::min(r0, 0.1 * pot.breakpoints.front());
  return r0;
}

SweepResult outward_sweep(const RadialPotential &pot, int kappa, double E, double match_r,
                          double rel_tol, std::vector<std::pair<double, double>> *samples) {
  const double r0 = outward_start_radius(pot);
  const State start = pot.atom_weight != 0.0
                          ? coulomb_series_start(pot.atom_weight, kappa,
                                                 E + pot.bounded_at_zero, r0)
                          : regular_series_start(kappa, E + pot.bounded_at_zero, r0);
  return sweep(pot, kappa, E, start, r0, match_r, rel_tol, samples);
}

SweepResult inward_sweep(const RadialPotential &pot, int kappa, double E, double match_r,
                         double rel_tol, std::vector<std::pair<double, double>> *samples) {
  const double r_far = far_radius(pot, E);
  const double decay = std::sqrt((1.0 - E) / (1.0 + E));
  const State start = {1.0, -decay};
  return sweep(pot, kappa, E, start, r_far, match_r, rel_tol, samples);
}

} // namespace

double point_charge_level(double nu, int kappa, int n_r) {
  if (kappa == 0)
    throw ValidationError("InvalidBasisSpec", "kappa must be nonzero");
  if (!(nu > 0.0))
    throw ValidationError("BadComponent", "point level needs positive coupling");
  if (nu >= std::abs(kappa))
    throw ValidationError("Supercritical", "nu >= |kappa|: no closed-form level");
  if (n_r < 0 || (n_r == 0 && kappa > 0))
    throw ValidationError("BadLevelIndex", "radial excitation not admissible for this channel");
  const double gamma = std::sqrt(static_cast<double>(kappa) * kappa - nu * nu);
  const double denom = n_r + gamma;
  return 1.0 / std::sqrt(1.0 + nu * nu / (denom * denom));
}

std::vector<double> point_charge_levels(double nu, int kappa, int count) {
  std::vector<double> out;
  out.reserve(count);
  int n_r = kappa > 0 ? 1 : 0;
  for (int i = 0; i < count; ++i)
    out.push_back(point_charge_level(nu, kappa, n_r++));
  return out;
}

RadialPotential radial_potential(const ChargeMeasure &measure) {
  measure.validate(MeasureRegime::solver);
  if (!measure.is_radial())
    throw ValidationError("NotRadial", "shooting needs a radial measure");
  RadialPotential pot;
  ChargeMeasure copy = measure;
  pot.V = [copy](double r) { return copy.potential_radial(r); };
  pot.breakpoints = measure.radial_breakpoints();
  pot.atom_weight = measure.central_atom_weight();
  pot.bounded_at_zero = measure.bounded_potential_at_zero();
  pot.outermost = measure.outermost_feature();
  return pot;
}

ChannelShot integrate_channel(const RadialPotential &pot, int kappa, double E, double match_r,
                              double rel_tol) {
  if (kappa == 0)
    throw ValidationError("InvalidBasisSpec", "kappa must be nonzero");
  if (!(E > -1.0 && E < 1.0))
    throw SolverError("LambdaOutOfGap", "shooting energy outside the gap");
  const auto out = outward_sweep(pot, kappa, E, match_r, rel_tol, nullptr);
  const auto in = inward_sweep(pot, kappa, E, match_r, rel_tol, nullptr);
  ChannelShot shot;
  shot.f_out = out.state[0];
  shot.g_out = out.state[1];
  shot.f_in = in.state[0];
  shot.g_in = in.state[1];
  shot.ratio_out = out.state[1] / out.state[0];
  shot.ratio_in = in.state[1] / in.state[0];
  const double norm = (std::abs(shot.f_out) + std::abs(shot.g_out)) *
                      (std::abs(shot.f_in) + std::abs(shot.g_in));
  shot.defect = (shot.f_out * shot.g_in - shot.g_out * shot.f_in) / norm;
  shot.nodes_out = out.nodes;
  return shot;
}

namespace {

double default_match_radius(const RadialPotential &pot) {
  return std::max(1.0, pot.outermost);
}

//! Sign changes of f over the whole outward range [r0, r_far].
int outward_node_count(const RadialPotential &pot, int kappa, double E, double rel_tol) {
  return outward_sweep(pot, kappa, E, far_radius(pot, E), rel_tol, nullptr).nodes;
}

} // namespace

double shoot_eigenvalue(const RadialPotential &pot, int kappa, double E_lo, double E_hi,
                        double defect_tol) {
  const double match_r = default_match_radius(pot);
  const double rel_tol = 1e-12;
  auto defect = [&](double E) { return integrate_channel(pot, kappa, E, match_r, rel_tol).defect; };

  double a = E_lo, b = E_hi;
  double fa = defect(a), fb = defect(b);
  if (std::signbit(fa) == std::signbit(fb))
    throw SolverError("NoSignChange", "defect has equal signs at the bracket ends");

  for (int it = 0; it < 80 && b - a > 1e-15; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b)
      break;
    const double fm = defect(mid);
    if (fm == 0.0)
      return mid;
    if (std::signbit(fm) == std::signbit(fa)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
      fb = fm;
    }
  }

  double best = std::abs(fa) < std::abs(fb) ? a : b;
  double best_d = std::min(std::abs(fa), std::abs(fb));
  double xa = a, da = fa, xb = b, db = fb;
  for (int it = 0; it < 8 && da != db; ++it) {
    const double c = xb - db * (xb - xa) / (db - da);
    if (!(c >= a && c <= b))
      break;
    const double dc = defect(c);
    if (std::abs(dc) < best_d) {
      best_d = std::abs(dc);
      best = c;
    }
    xa = xb;
    da = db;
    xb = c;
    db = dc;
    if (dc == 0.0)
      break;
  }
  if (best_d >= defect_tol)
    throw SolverError("DefectNotConverged", "match defect stalled above tolerance");
  return best;
}

std::vector<double> reference_levels(const RadialPotential &pot, int kappa, int count) {
  const double rel_tol = 1e-12;
  const double e_floor = -0.999, e_ceil = 1.0 - 1e-6;
  std::map<double, int> node_cache;
  auto nodes_at = [&](double E) {
    auto it = node_cache.find(E);
    if (it != node_cache.end())
      return it->second;
    const int n = outward_node_count(pot, kappa, E, rel_tol);
    node_cache.emplace(E, n);
    return n;
  };

  const int base = nodes_at(e_floor);
  std::vector<double> levels;
  for (int j = 1; j <= count; ++j) {
    double lo = e_floor, hi = e_ceil;
    if (nodes_at(hi) - base < j)
      throw SolverError("NoRootInGap",
                        "fewer than the requested number of levels inside the scan window");
    // Localize the j-th node-count jump.
    while (hi - lo > 1e-9) {
      const double mid = 0.5 * (lo + hi);
      if (nodes_at(mid) - base >= j)
        hi = mid;
      else
        lo = mid;
    }
    levels.push_back(shoot_eigenvalue(pot, kappa, lo, hi));
  }
  return levels;
}

std::vector<std::pair<double, double>> eigenfunction_samples(const RadialPotential &pot,
                                                             int kappa, double E,
                                                             double match_r) {
  const double rel_tol = 1e-12;
  std::vector<std::pair<double, double>> out_samples, in_samples;
  const auto out = outward_sweep(pot, kappa, E, match_r, rel_tol, &out_samples);
  const auto in = inward_sweep(pot, kappa, E, match_r, rel_tol, &in_samples);
  const double scale = out.state[0] / in.state[0];
  std::reverse(in_samples.begin(), in_samples.end());
  for (auto &s : in_samples)
    s.second *= scale;
  out_samples.insert(out_samples.end(), in_samples.begin(), in_samples.end());
  double peak = 0.0;
  for (const auto &s : out_samples)
    peak = std::max(peak, std::abs(s.second));
  if (peak > 0.0)
    for (auto &s : out_samples)
      s.second /= peak;
  return out_samples;
}

} // namespace dgap
