// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0

#include "dgap/gap_minmax.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>

#include "dgap/errors.hpp"

namespace dgap {

namespace {

std::atomic<long> g_monotone_violations{0};

} // namespace

long monotonicity_violation_count() { return g_monotone_violations.load(); }

namespace {

//! Evaluation log with a strict-decrease audit against all neighbors.
class MonotoneLog {
public:
  double eval(const std::function<double(double)> &mk, double lambda) {
    auto it = log_.find(lambda);
    if (it != log_.end())
      return it->second;
    const double m = mk(lambda);
    ++count_;
    auto [pos, inserted] = log_.emplace(lambda, m);
    if (pos != log_.begin()) {
      auto prev = std::prev(pos);
      check(prev->first, prev->second, lambda, m);
    }
    if (std::next(pos) != log_.end()) {
      auto next = std::next(pos);
      check(lambda, m, next->first, next->second);
    }
    return m;
  }

  int count() const { return count_; }

private:
  static void check(double la, double ma, double lb, double mb) {
    const double slack = 1e-10 * std::max({1.0, std::abs(ma), std::abs(mb)});
    if (mb > ma + slack) {
      ++g_monotone_violations;
      throw SolverError("NonMonotoneDetected",
                        "level curve increased between lambda = " + std::to_string(la) + " and " +
                            std::to_string(lb));
    }
  }

  std::map<double, double> log_;
  int count_ = 0;
};

} // namespace

RootResult find_decreasing_root(const std::function<double(double)> &mk, double tol) {
  if (!(tol > 0.0))
    throw ValidationError("BadTolerance", "root tolerance must be positive");
  MonotoneLog log;

  // 21-point scan: the guarded edges plus -0.9 .. 0.9 in steps of 0.1.
  std::vector<double> scan;
  scan.push_back(-1.0 + kGapGuard);
  for (int i = 0; i <= 18; ++i)
    scan.push_back(-0.9 + 0.1 * i);
  scan.push_back(1.0 - kGapGuard);

  double lo = scan.front();
  double m_lo = log.eval(mk, lo);
  if (m_lo < 0.0)
    throw SolverError("NoRootInGap", "level curve already negative at the lower gap edge");
  if (m_lo == 0.0)
    return {lo, 0.0, 0.0, log.count()};

  double hi = lo, m_hi = m_lo;
  bool bracketed = false;
  for (std::size_t i = 1; i < scan.size(); ++i) {
    hi = scan[i];
    m_hi = log.eval(mk, hi);
    if (m_hi <= 0.0) {
      bracketed = true;
      break;
    }
    lo = hi;
    m_lo = m_hi;
  }
  if (!bracketed)
    throw SolverError("NoRootInGap", "level curve stays positive up to the upper gap edge");

  // Bisection until the bracket is small enough.
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi)
      break; // double resolution exhausted
    const double m_mid = log.eval(mk, mid);
    if (m_mid > 0.0) {
      lo = mid;
      m_lo = m_mid;
    } else {
      hi = mid;
      m_hi = m_mid;
    }
  }

  // Secant polish inside the final bracket.
  double best_l = std::abs(m_lo) <= std::abs(m_hi) ? lo : hi;
  double best_m = std::min(std::abs(m_lo), std::abs(m_hi));
  double a = lo, fa = m_lo, b = hi, fb = m_hi;
  for (int it = 0; it < 6 && fa != fb; ++it) {
    const double c = b - fb * (b - a) / (fb - fa);
    if (!(c > lo && c < hi))
      break;
    const double fc = log.eval(mk, c);
    if (std::abs(fc) < best_m) {
      best_m = std::abs(fc);
      best_l = c;
    }
    a = b;
    fa = fb;
    b = c;
    fb = fc;
    if (fc == 0.0)
      break;
  }

  return {best_l, best_m, hi - lo, log.count()};
}

double level_function(const ChannelPencil &pencil, int k, double lambda) {
  if (k < 1 || k > pencil.dim())
    throw ValidationError("BadLevelIndex", "level index out of range");
  return pencil.smallest_levels(lambda, k)[k - 1];
}

MinMaxLevel find_level(const ChannelPencil &pencil, int k, double tol) {
  if (k < 1 || k > pencil.dim())
    throw ValidationError("BadLevelIndex", "level index out of range");
  const auto root = find_decreasing_root(
      [&pencil, k](double lambda) { return pencil.smallest_levels(lambda, k)[k - 1]; }, tol);
  MinMaxLevel out;
  out.lambda = root.lambda;
  out.residual = root.residual;
  out.bracket_width = root.bracket_width;
  out.kappa = pencil.kappa();
  out.within_channel = k;
  out.degeneracy = 2 * std::abs(pencil.kappa());
  out.evaluations = root.evaluations;
  out.basis_dim = pencil.dim();
  return out;
}

SpectrumResult spectrum_in_gap(const ChargeMeasure &measure, const std::vector<int> &kappas,
                               int k_per_channel, double tol, const RadialBasisSpec &basis_spec,
                               std::optional<double> potential_cap) {
  if (kappas.empty())
    throw ValidationError("BadChannelList", "no spin-orbit channels requested");
  if (k_per_channel < 1)
    throw ValidationError("BadChannelList", "k_per_channel must be >= 1");
  SpectrumResult result;
  for (int kappa : kappas) {
    ChannelStatus status;
    status.kappa = kappa;
    status.requested = k_per_channel;
    try {
      ChannelPencil pencil(measure, kappa, basis_spec, potential_cap);
      for (int k = 1; k <= k_per_channel; ++k) {
        try {
          result.levels.push_back(find_level(pencil, k, tol));
          ++status.found;
        } catch (const SolverError &err) {
          if (err.name() == "NoRootInGap") {
            status.error = err.name();
            break; // higher levels in this channel lie outside too
          }
          throw;
        }
      }
    } catch (const Error &err) {
      status.error = err.name();
    }
    result.channels.push_back(status);
  }
  std::sort(result.levels.begin(), result.levels.end(),
            [](const MinMaxLevel &a, const MinMaxLevel &b) { return a.lambda < b.lambda; });
  return result;
}

TruncationSweep truncation_sweep(const ChargeMeasure &measure, int kappa, int k,
                                 const std::vector<double> &caps, double tol,
                                 const RadialBasisSpec &basis_spec) {
  if (caps.empty())
    throw ValidationError("BadCapList", "no truncation caps given");
  for (std::size_t i = 0; i < caps.size(); ++i) {
    if (!(caps[i] > 0.0))
      throw ValidationError("BadCapList", "caps must be positive");
    if (i > 0 && !(caps[i] > caps[i - 1]))
      throw ValidationError("BadCapList", "caps must be strictly increasing");
  }
  TruncationSweep sweep;
  for (double cap : caps) {
    ChannelPencil pencil(measure, kappa, basis_spec, cap);
    sweep.points.push_back({cap, find_level(pencil, k, tol).lambda});
  }
  ChannelPencil full(measure, kappa, basis_spec);
  sweep.uncapped = find_level(full, k, tol).lambda;
  return sweep;
}

} // namespace dgap
