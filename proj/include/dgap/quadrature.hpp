// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <vector>

#include "dgap/charge_measure.hpp"

namespace dgap {

//! Gauss-Legendre rule on [-1, 1].
struct QuadRule {
  std::vector<double> x;
  std::vector<double> w;
};

//! Nodes and weights for an n-point Gauss-Legendre rule (cached per n).
const QuadRule &gauss_legendre(int n);

//! One-dimensional composite Gauss-Legendre integral over [a, b] split at the
//! given interior breakpoints, pts points per subinterval.
double integrate_1d(const std::function<double(double)> &f, double a, double b,
                    const std::vector<double> &interior_breaks, int pts);

//! Geometric subdivision of [r0, r1] into n intervals (ratio constant).
std::vector<double> geometric_breakpoints(double r0, double r1, int n);

//! Product angular grid on the unit sphere: Gauss-Legendre in cos(theta) times
//! a uniform azimuthal trapezoid; weights sum to 4 pi.
struct AngularGrid {
  std::vector<Vec3> dir;
  std::vector<double> w;
};
AngularGrid product_angular(int n_theta);

//! Radial-angular grid around a center for integrals over R^3. The radial part
//! is [0, r_first] plus a geometric ladder up to r_outer, GL pts per interval.
struct SphericalGridSpec {
  Vec3 center = Vec3::Zero();
  double r_first = 1e-3;
  double r_outer = 40.0;
  int radial_intervals = 40;
  int radial_pts = 8;
  int n_theta = 12;
};

struct WeightedNode {
  Vec3 x;
  double w;
};

std::vector<WeightedNode> spherical_grid(const SphericalGridSpec &spec);

//! Integral of f over R^3 on the grid of the given spec.
double integrate_spherical(const std::function<double(const Vec3 &)> &f,
                           const SphericalGridSpec &spec);

//! Refines the grid spec (doubling radial intervals and angular order) until two
//! consecutive values agree to rel_tol relative to max(|I|, abs_floor).
//! Throws SolverError (QuadratureFailure) when max_refine levels do not reach it.
double integrate_spherical_adaptive(const std::function<double(const Vec3 &)> &f,
                                    SphericalGridSpec spec, double rel_tol, double abs_floor,
                                    int max_refine = 5);

//! Vector-valued variant: f writes n_components values for a point into its
//! second argument; refinement continues until every component agrees.
std::vector<double>
integrate_spherical_adaptive_multi(const std::function<void(const Vec3 &, double *)> &f,
                                   int n_components, SphericalGridSpec spec, double rel_tol,
                                   double abs_floor, int max_refine = 5);

//! Semi-infinite radial integral of g over [a, inf) with algebraic tail:
//! [a, r_switch] by composite GL split at breakpoints, the tail by the
//! u = 1/r substitution on (0, 1/r_switch].
double integrate_radial_to_infinity(const std::function<double(double)> &g, double a,
                                    double r_switch, const std::vector<double> &interior_breaks,
                                    int pts);

} // namespace dgap
