// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"

#include "dgap/birman_schwinger.hpp"
#include "dgap/errors.hpp"
#include "dgap/spinor_grid.hpp"

using namespace dgap;

namespace {

CVec random_field(const SpinorGrid &g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  CVec f = g.make_field();
  for (auto &z : f)
    z = std::complex<double>(nd(rng), nd(rng));
  return f;
}

} // namespace

TEST_CASE("grid transforms satisfy Parseval") {
  SpinorGrid g(16, 8.0);
  CVec a = random_field(g, 3);
  const double before = g.norm(a);
  CVec b = a;
  g.forward(b);
  g.inverse(b);
  double diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    diff = std::max(diff, std::abs(a[i] - b[i]));
  CHECK(diff < 1e-12 * before);
  // Plancherel with the 1/N^3-normalized inverse: forward scales norm^2 by
  // N^3 relative to the lattice inner product.
  CVec c = a;
  g.forward(c);
  const double n3 = std::pow(static_cast<double>(g.n()), 3);
  CHECK(g.norm(c) == doctest::Approx(before * std::sqrt(n3)).epsilon(1e-12));
}

TEST_CASE("free resolvent inverts the shifted Dirac operator") {
  SpinorGrid g(16, 8.0);
  // Smooth compact bump so periodic wraparound is negligible.
  CVec f = g.make_field();
  for (int c = 0; c < 4; ++c)
    for (int ix = 0; ix < g.n(); ++ix)
      for (int iy = 0; iy < g.n(); ++iy)
        for (int iz = 0; iz < g.n(); ++iz) {
          const Vec3 x = g.node(ix, iy, iz);
          const std::size_t idx =
              ((static_cast<std::size_t>(c) * g.n() + ix) * g.n() + iy) * g.n() + iz;
          f[idx] = (c + 1) * std::exp(-0.7 * x.squaredNorm());
        }
  const double lambda = 0.35;
  CVec r = f;
  g.apply_free_resolvent(r, lambda);
  g.apply_dirac_minus_lambda(r, lambda);
  double diff = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    diff = std::max(diff, std::abs(f[i] - r[i]));
  CHECK(diff < 1e-11 * g.norm(f));
  CHECK_THROWS_AS(g.apply_free_resolvent(r, 1.0), SolverError);
}

TEST_CASE("sampled potential respects the cap and the closed form") {
  SpinorGrid g(16, 8.0);
  ChargeMeasure m;
  m.add(SphericalShell{Vec3::Zero(), 0.8, 1.0});
  const auto v = sampled_potential(g, m, 0.5);
  REQUIRE(v.size() == g.points());
  double vmax = 0.0;
  for (double x : v)
    vmax = std::max(vmax, x);
  CHECK(vmax <= 0.5 + 1e-15);
  const auto vfree = sampled_potential(g, m, 1e4);
  // Far corner follows w / r.
  const Vec3 corner = g.node(1, 1, 1);
  const std::size_t idx = (static_cast<std::size_t>(1) * g.n() + 1) * g.n() + 1;
  CHECK(vfree[idx] == doctest::Approx(0.8 / corner.norm()).epsilon(1e-12));
}

TEST_CASE("Birman-Schwinger operator is self-adjoint and PSD-squared") {
  SpinorGrid g(16, 10.0);
  ChargeMeasure m;
  m.add(SphericalShell{Vec3::Zero(), 0.8, 1.0});
  BsOperator op(g, m, 0.2, 1e4);
  CVec u = random_field(g, 11), v = random_field(g, 12);
  CVec ku = g.make_field(), kv = g.make_field();
  op.apply(u, ku);
  op.apply(v, kv);
  const auto lhs = g.inner(ku, v);
  const auto rhs = g.inner(u, kv);
  CHECK(std::abs(lhs - rhs) < 1e-10 * g.norm(u) * g.norm(v));
  // apply_square == apply twice.
  CVec kku = g.make_field();
  op.apply(ku, kku);
  CVec sq = g.make_field();
  op.apply_square(u, sq);
  double diff = 0.0;
  for (std::size_t i = 0; i < sq.size(); ++i)
    diff = std::max(diff, std::abs(sq[i] - kku[i]));
  CHECK(diff < 1e-11 * g.norm(kku));
  // (K-1)^2 u = K^2 u - 2 K u + u.
  CVec sh = g.make_field();
  op.apply_shifted_square(u, sh);
  diff = 0.0;
  for (std::size_t i = 0; i < sh.size(); ++i)
    diff = std::max(diff, std::abs(sh[i] - (sq[i] - 2.0 * ku[i] + u[i])));
  CHECK(diff < 1e-11 * g.norm(u));
}

TEST_CASE("Lanczos norm estimate converges and is seed-stable") {
  SpinorGrid g(16, 10.0);
  ChargeMeasure m;
  m.add(SphericalShell{Vec3::Zero(), 0.8, 1.0});
  BsOperator op(g, m, 0.0, 1e4);
  const auto e1 = bs_norm_estimate(op, 5, 400);
  const auto e2 = bs_norm_estimate(op, 99, 400);
  CHECK(e1.residual <= 1e-6);
  CHECK(e1.estimate == doctest::Approx(e2.estimate).epsilon(1e-7));
  CHECK_FALSE(e1.trace.empty());
  // An unreachable residual target must raise Stagnation, and budgets below
  // the floor are rejected outright.
  CHECK_THROWS_WITH_AS(bs_norm_estimate(op, 5, 50, 1e-30), doctest::Contains("Stagnation"),
                       SolverError);
  CHECK_THROWS_WITH_AS(bs_norm_estimate(op, 5, 3, 1e-6),
                       doctest::Contains("BadIterationBudget"), ValidationError);
}
