// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <vector>

#include "doctest.h"

#include "dgap/bspline.hpp"
#include "dgap/errors.hpp"

using namespace dgap;

namespace {

// Value of the full clamped basis at r, reconstructed from the local view.
std::vector<double> full_values(const RadialBasis &b, double r) {
  std::vector<double> vals(static_cast<std::size_t>(b.dimension() + 2), 0.0);
  const auto loc = b.eval_local(b.find_interval(r), r);
  for (int j = 0; j < loc.count; ++j)
    vals[static_cast<std::size_t>(loc.first_full + j)] = loc.value[static_cast<std::size_t>(j)];
  return vals;
}

} // namespace

TEST_CASE("dimension and graded breakpoints") {
  RadialBasisSpec spec;
  spec.r_max = 10.0;
  spec.n_intervals = 16;
  spec.order = 4;
  spec.grading = 2.0;
  RadialBasis b(spec);
  CHECK(b.dimension() == 16 + 4 - 3);
  const auto &brk = b.breakpoints();
  REQUIRE(static_cast<int>(brk.size()) == 17);
  CHECK(brk.front() == doctest::Approx(0.0));
  CHECK(brk.back() == doctest::Approx(10.0));
  // Graded toward the origin.
  CHECK(brk[1] == doctest::Approx(10.0 * std::pow(1.0 / 16.0, 2.0)).epsilon(1e-13));
}

TEST_CASE("partition of unity and derivative closure") {
  RadialBasisSpec spec;
  spec.r_max = 7.0;
  spec.n_intervals = 23;
  spec.order = 6;
  spec.grading = 3.0;
  RadialBasis b(spec);
  for (double r : {1e-4, 0.03, 0.8, 2.7, 5.2, 6.999}) {
    const auto loc = b.eval_local(b.find_interval(r), r);
    double s = 0.0, ds = 0.0;
    for (int j = 0; j < loc.count; ++j) {
      s += loc.value[static_cast<std::size_t>(j)];
      ds += loc.deriv[static_cast<std::size_t>(j)];
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(ds) < 1e-9);
  }
}

TEST_CASE("kept basis vanishes at both ends") {
  RadialBasisSpec spec;
  RadialBasis b(spec);
  for (int k : {0, 1, b.dimension() / 2, b.dimension() - 1}) {
    CHECK(b.value(k, 0.0) == doctest::Approx(0.0));
    CHECK(b.value(k, spec.r_max) == doctest::Approx(0.0));
  }
  CHECK(b.value(0, -1.0) == 0.0);
  CHECK(b.value(0, spec.r_max + 1.0) == 0.0);
}

TEST_CASE("local and global evaluation agree") {
  RadialBasisSpec spec;
  spec.n_intervals = 40;
  RadialBasis b(spec);
  for (double r : {0.01, 0.5, 3.3, 17.0, 39.0}) {
    const auto vals = full_values(b, r);
    for (int full = 0; full < b.dimension() + 2; ++full) {
      const int kept = b.kept_index(full);
      if (kept < 0)
        continue;
      CHECK(b.value(kept, r) ==
            doctest::Approx(vals[static_cast<std::size_t>(full)]).epsilon(1e-13));
    }
  }
}

TEST_CASE("splines reproduce polynomials up to the degree") {
  // Collocation of x^2 on the full basis via least squares would be overkill;
  // instead check the derivative of a spline combination against a finite
  // difference, confirming value/deriv consistency.
  RadialBasisSpec spec;
  spec.r_max = 5.0;
  spec.n_intervals = 10;
  spec.order = 5;
  RadialBasis b(spec);
  const double h = 1e-6;
  for (int k : {0, 3, 7, b.dimension() - 1}) {
    for (double r : {0.4, 1.9, 4.4}) {
      const double fd = (b.value(k, r + h) - b.value(k, r - h)) / (2.0 * h);
      CHECK(b.deriv(k, r) == doctest::Approx(fd).epsilon(5e-6));
    }
  }
}

TEST_CASE("invalid specs are rejected") {
  RadialBasisSpec bad;
  bad.order = 1;
  CHECK_THROWS_AS(RadialBasis{bad}, ValidationError);
  bad = RadialBasisSpec{};
  bad.n_intervals = 1;
  CHECK_THROWS_AS(RadialBasis{bad}, ValidationError);
  bad = RadialBasisSpec{};
  bad.r_max = -1.0;
  CHECK_THROWS_AS(RadialBasis{bad}, ValidationError);
  bad = RadialBasisSpec{};
  bad.order = RadialBasis::kMaxOrder + 1;
  CHECK_THROWS_AS(RadialBasis{bad}, ValidationError);
}
