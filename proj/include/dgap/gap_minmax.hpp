// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dgap/radial_channel.hpp"

namespace dgap {

//! One located level: the root of the k-th eigenvalue curve m_k(lambda) of the
//! pencil (A(lambda), M) inside the guarded gap.
struct MinMaxLevel {
  double lambda = 0.0;
  double residual = 0.0;      // |m_k| at the returned lambda
  double bracket_width = 0.0; // final bisection bracket
  int kappa = 0;              // channel provenance; 0 for multicenter pencils
  int within_channel = 0;     // 1-based index inside the channel
  int degeneracy = 1;
  int evaluations = 0;
  int basis_dim = 0;
};

//! Root of a strictly decreasing curve on the guarded gap: 21-point bracket
//! scan, bisection to |bracket| <= tol, then secant polish. Every evaluation
//! is logged and audited for monotonicity; a strict increase raises
//! SolverError (NonMonotoneDetected); absence of a sign change raises
//! SolverError (NoRootInGap).
struct RootResult {
  double lambda;
  double residual;
  double bracket_width;
  int evaluations;
};
RootResult find_decreasing_root(const std::function<double(double)> &mk, double tol);

//! Process-wide count of monotonicity audit failures (0 on a healthy suite).
long monotonicity_violation_count();

//! m_k(lambda) for a channel pencil (k is 1-based).
double level_function(const ChannelPencil &pencil, int k, double lambda);

//! k-th gap level of a channel pencil.
MinMaxLevel find_level(const ChannelPencil &pencil, int k, double tol);

struct ChannelStatus {
  int kappa = 0;
  int requested = 0;
  int found = 0;
  std::string error; // first error name, empty when clean
};

struct SpectrumResult {
  std::vector<MinMaxLevel> levels; // merged, sorted by lambda
  std::vector<ChannelStatus> channels;
};

//! Gap levels of a radial measure over the listed spin-orbit channels, up to
//! k_per_channel roots each, each level carrying degeneracy 2|kappa|.
//! Channel-local failures are recorded in the status list, not rethrown.
SpectrumResult spectrum_in_gap(const ChargeMeasure &measure, const std::vector<int> &kappas,
                               int k_per_channel, double tol, const RadialBasisSpec &basis_spec,
                               std::optional<double> potential_cap = std::nullopt);

struct TruncationPoint {
  double cap;
  double lambda;
};

struct TruncationSweep {
  std::vector<TruncationPoint> points;
  double uncapped = 0.0;
};

//! Lowest-level trajectory under potential caps min(V, cap) for strictly
//! increasing caps, plus the uncapped reference value.
TruncationSweep truncation_sweep(const ChargeMeasure &measure, int kappa, int k,
                                 const std::vector<double> &caps, double tol,
                                 const RadialBasisSpec &basis_spec);

} // namespace dgap
