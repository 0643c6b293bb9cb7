// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <vector>

namespace dgap {

//! Radial discretization parameters: graded breakpoints r_j = r_max (j/n)^grading
//! on [0, r_max], clamped B-splines of the given order (degree + 1), with the
//! first and last spline dropped to impose zero values at both ends.
struct RadialBasisSpec {
  double r_max = 40.0;
  int n_intervals = 200;
  int order = 6;
  double grading = 3.0;
};

//! Clamped B-spline basis on a graded radial mesh. Kept-basis indexing skips
//! the first and last spline, so dimension = n_intervals + order - 3.
class RadialBasis {
public:
  static constexpr int kMaxOrder = 12;

  explicit RadialBasis(const RadialBasisSpec &spec);

  const RadialBasisSpec &spec() const { return spec_; }
  int order() const { return spec_.order; }
  int dimension() const { return dimension_; }
  int n_intervals() const { return spec_.n_intervals; }
  const std::vector<double> &breakpoints() const { return breakpoints_; }

  //! Values and first derivatives of all splines supported on breakpoint
  //! interval `iv` at radius r, in full-basis indexing starting at `first_full`.
  struct Local {
    int first_full;
    int count;
    std::array<double, kMaxOrder> value;
    std::array<double, kMaxOrder> deriv;
  };
  Local eval_local(int iv, double r) const;

  //! Kept-basis index for a full-basis spline index, or -1 when dropped.
  int kept_index(int full) const {
    return (full >= 1 && full <= dimension_) ? full - 1 : -1;
  }

  //! Single kept-basis function value / derivative at r (0 outside [0, r_max]).
  double value(int kept, double r) const;
  double deriv(int kept, double r) const;

  //! Index of the breakpoint interval containing r (clamped to valid range).
  int find_interval(double r) const;

private:
  RadialBasisSpec spec_;
  int dimension_;
  std::vector<double> breakpoints_;
  std::vector<double> knots_; // clamped knot vector
};

} // namespace dgap
