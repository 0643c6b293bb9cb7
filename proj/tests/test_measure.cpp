// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"

#include "dgap/charge_measure.hpp"
#include "dgap/errors.hpp"

using namespace dgap;

TEST_CASE("point charge potential and bookkeeping") {
  ChargeMeasure m;
  m.add(PointCharge{Vec3(0.0, 0.0, 0.0), 0.5});
  CHECK(m.total_charge() == doctest::Approx(0.5));
  CHECK(m.total_variation() == doctest::Approx(0.5));
  CHECK(m.is_radial());
  CHECK(m.potential(Vec3(2.0, 0.0, 0.0)) == doctest::Approx(0.25));
  CHECK(m.potential_radial(4.0) == doctest::Approx(0.125));
  CHECK(m.central_atom_weight() == doctest::Approx(0.5));
  CHECK(m.outermost_feature() == 0.0);
  CHECK_THROWS_AS(m.potential(Vec3::Zero()), SolverError);
  CHECK_THROWS_AS(m.potential_radial(0.0), SolverError);
}

TEST_CASE("shell potential follows Newton's theorem") {
  ChargeMeasure m;
  m.add(SphericalShell{Vec3::Zero(), 0.9, 2.0});
  // Constant inside, point-like outside.
  CHECK(m.potential_radial(0.0) == doctest::Approx(0.45));
  CHECK(m.potential_radial(1.3) == doctest::Approx(0.45));
  CHECK(m.potential_radial(2.0) == doctest::Approx(0.45));
  CHECK(m.potential_radial(4.5) == doctest::Approx(0.2));
  CHECK(m.bounded_potential_at_zero() == doctest::Approx(0.45));
  CHECK(m.central_atom_weight() == 0.0);
  CHECK(m.outermost_feature() == doctest::Approx(2.0));
  const auto breaks = m.radial_breakpoints();
  REQUIRE(breaks.size() == 1);
  CHECK(breaks[0] == doctest::Approx(2.0));
}

TEST_CASE("uniform ball potential matches the closed form") {
  const double w = 0.7, R = 1.5;
  ChargeMeasure m;
  m.add(make_uniform_ball(Vec3::Zero(), w, R));
  CHECK(m.total_charge() == doctest::Approx(w).epsilon(1e-12));
  for (double r : {0.0, 0.4, 1.0, 1.5}) {
    const double expected = w * (3.0 * R * R - r * r) / (2.0 * R * R * R);
    CHECK(m.potential_radial(r) == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK(m.potential_radial(3.0) == doctest::Approx(w / 3.0).epsilon(1e-12));
  // Off-center evaluation agrees with the radial closed form.
  CHECK(m.potential(Vec3(0.3, -0.2, 0.6)) ==
        doctest::Approx(m.potential_radial(Vec3(0.3, -0.2, 0.6).norm())).epsilon(1e-12));
}

TEST_CASE("enclosed charge per component kind") {
  ChargeMeasure m;
  m.add(PointCharge{Vec3::Zero(), 0.2});
  m.add(SphericalShell{Vec3::Zero(), 0.3, 1.0});
  m.add(make_uniform_ball(Vec3::Zero(), 0.4, 2.0));
  CHECK(m.enclosed_charge(0.5) == doctest::Approx(0.2 + 0.4 * std::pow(0.25, 3)).epsilon(1e-12));
  CHECK(m.enclosed_charge(1.0) == doctest::Approx(0.2 + 0.3 + 0.4 * 0.125).epsilon(1e-12));
  CHECK(m.enclosed_charge(5.0) == doctest::Approx(0.9).epsilon(1e-12));
  // -Q(r)/r^2 is the potential slope away from breakpoints.
  const double r = 1.7, h = 1e-6;
  const double slope = (m.potential_radial(r + h) - m.potential_radial(r - h)) / (2.0 * h);
  CHECK(slope == doctest::Approx(-m.enclosed_charge(r) / (r * r)).epsilon(1e-6));
}

TEST_CASE("validation regimes") {
  ChargeMeasure empty;
  CHECK_THROWS_WITH_AS(empty.validate(MeasureRegime::solver),
                       doctest::Contains("measure is zero"), ValidationError);

  ChargeMeasure heavy;
  heavy.add(PointCharge{Vec3::Zero(), 1.0});
  CHECK_THROWS_AS(heavy.validate(MeasureRegime::solver), ValidationError);
  CHECK_THROWS_AS(heavy.validate(MeasureRegime::extension), ValidationError);

  // Two sub-unit atoms at one center merge into a too-heavy one.
  ChargeMeasure merged;
  merged.add(PointCharge{Vec3(1.0, 0.0, 0.0), 0.6});
  merged.add(PointCharge{Vec3(1.0, 0.0, 0.0), 0.5});
  CHECK_THROWS_AS(merged.validate(MeasureRegime::extension), ValidationError);
  REQUIRE(merged.atom_weights().size() == 1);
  CHECK(merged.atom_weights()[0].weight == doctest::Approx(1.1));

  ChargeMeasure signedm;
  signedm.add(PointCharge{Vec3::Zero(), -0.5});
  CHECK_NOTHROW(signedm.validate(MeasureRegime::extension));
  CHECK_THROWS_AS(signedm.validate(MeasureRegime::solver), ValidationError);
  CHECK(signedm.total_charge() == doctest::Approx(-0.5));
  CHECK(signedm.total_variation() == doctest::Approx(0.5));

  ChargeMeasure badshell;
  badshell.add(SphericalShell{Vec3::Zero(), 0.5, -1.0});
  CHECK_THROWS_AS(badshell.validate(MeasureRegime::solver), ValidationError);
}

TEST_CASE("radial detection uses the common center") {
  ChargeMeasure m;
  m.add(PointCharge{Vec3(0.0, 1.0, 0.0), 0.3});
  m.add(SphericalShell{Vec3(0.0, 1.0, 0.0), 0.2, 0.5});
  CHECK(m.is_radial());
  CHECK(m.radial_center().isApprox(Vec3(0.0, 1.0, 0.0)));
  m.add(PointCharge{Vec3(0.0, -1.0, 0.0), 0.1});
  CHECK_FALSE(m.is_radial());
  CHECK_THROWS_AS(m.radial_center(), ValidationError);
}
