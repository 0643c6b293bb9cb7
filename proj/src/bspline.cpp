// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0

#include "dgap/bspline.hpp"

#include <algorithm>
#include <cmath>

#include "dgap/errors.hpp"

namespace dgap {

RadialBasis::RadialBasis(const RadialBasisSpec &spec) : spec_(spec) {
  if (spec.order < 3 || spec.order > kMaxOrder)
    throw ValidationError("InvalidBasisSpec", "spline order must be in [3, 12]");
  if (spec.n_intervals < 2)
    throw ValidationError("InvalidBasisSpec", "need at least 2 intervals");
  if (!(spec.r_max > 0.0))
    throw ValidationError("InvalidBasisSpec", "r_max must be positive");
  if (!(spec.grading >= 1.0))
    throw ValidationError("InvalidBasisSpec", "grading must be >= 1");
  dimension_ = spec.n_intervals + spec.order - 3;
  if (dimension_ < 1)
    throw ValidationError("InvalidBasisSpec", "basis dimension must be >= 1");

  breakpoints_.resize(spec.n_intervals + 1);
  for (int j = 0; j <= spec.n_intervals; ++j)
    breakpoints_[j] =
        spec.r_max * std::pow(static_cast<double>(j) / spec.n_intervals, spec.grading);
  breakpoints_.front() = 0.0;
  breakpoints_.back() = spec.r_max;

  knots_.clear();
  knots_.insert(knots_.end(), spec.order, 0.0);
  for (int j = 1; j < spec.n_intervals; ++j)
    knots_.push_back(breakpoints_[j]);
  knots_.insert(knots_.end(), spec.order, spec.r_max);
}

int RadialBasis::find_interval(double r) const {
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), r);
  int iv = static_cast<int>(it - breakpoints_.begin()) - 1;
  return std::clamp(iv, 0, spec_.n_intervals - 1);
}

RadialBasis::Local RadialBasis::eval_local(int iv, double r) const {
  const int p = spec_.order - 1; // polynomial degree
  // Knot span index in the clamped knot vector for breakpoint interval iv.
  const int span = iv + p;

  // Triangular Cox-de Boor table (NURBS-book style); first derivatives come
  // from the degree p-1 column afterwards.
  std::array<double, kMaxOrder> left{}, right{};
  std::array<std::array<double, kMaxOrder>, kMaxOrder> ndu{};
  ndu[0][0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = r - knots_[span + 1 - j];
    right[j] = knots_[span + j] - r;
    double saved = 0.0;
    for (int k = 0; k < j; ++k) {
      const double den = right[k + 1] + left[j - k];
      const double temp = den != 0.0 ? ndu[k][j - 1] / den : 0.0;
      ndu[k][j] = saved + right[k + 1] * temp;
      saved = left[j - k] * temp;
    }
    ndu[j][j] = saved;
  }

  Local out;
  out.first_full = span - p;
  out.count = p + 1;
  for (int k = 0; k <= p; ++k)
    out.value[k] = ndu[k][p];

  // First derivatives from the degree p-1 values:
  // N'_{i,p}(r) = p * ( N_{i,p-1}/(t_{i+p}-t_i) - N_{i+1,p-1}/(t_{i+p+1}-t_{i+1}) ).
  for (int k = 0; k <= p; ++k) {
    const int i = out.first_full + k;
    double d = 0.0;
    if (k > 0) {
      const double den = knots_[i + p] - knots_[i];
      if (den != 0.0)
        d += ndu[k - 1][p - 1] / den;
    }
    if (k < p) {
      const double den = knots_[i + p + 1] - knots_[i + 1];
      if (den != 0.0)
        d -= ndu[k][p - 1] / den;
    }
    out.deriv[k] = p * d;
  }
  return out;
}

double RadialBasis::value(int kept, double r) const {
  if (r < 0.0 || r > spec_.r_max)
    return 0.0;
  const int full = kept + 1;
  const auto loc = eval_local(find_interval(r), r);
  const int k = full - loc.first_full;
  return (k >= 0 && k < loc.count) ? loc.value[k] : 0.0;
}

double RadialBasis::deriv(int kept, double r) const {
  if (r < 0.0 || r > spec_.r_max)
    return 0.0;
  const int full = kept + 1;
  const auto loc = eval_local(find_interval(r), r);
  const int k = full - loc.first_full;
  return (k >= 0 && k < loc.count) ? loc.deriv[k] : 0.0;
}

} // namespace dgap
