// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0

#include "dgap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "dgap/errors.hpp"

namespace dgap {

namespace {
constexpr double kPi = std::numbers::pi;
} // namespace

const QuadRule &gauss_legendre(int n) {
  static std::map<int, QuadRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it != cache.end())
    return it->second;
  if (n < 1)
    throw ValidationError("BadQuadrature", "Gauss-Legendre order must be >= 1");

  QuadRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  // Newton iteration on P_n from Chebyshev-like initial guesses; symmetric pairs.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15)
        break;
    }
    rule.x[i] = -x;
    rule.x[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.w[i] = w;
    rule.w[n - 1 - i] = w;
  }
  if (n % 2 == 1)
    rule.x[n / 2] = 0.0;
  return cache.emplace(n, std::move(rule)).first->second;
}

double integrate_1d(const std::function<double(double)> &f, double a, double b,
                    const std::vector<double> &interior_breaks, int pts) {
  std::vector<double> edges;
  edges.push_back(a);
  for (double t : interior_breaks)
    if (t > a && t < b)
      edges.push_back(t);
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  const QuadRule &rule = gauss_legendre(pts);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double lo = edges[i], hi = edges[i + 1];
    const double h = 0.5 * (hi - lo), c = 0.5 * (hi + lo);
    double local = 0.0;
    for (int q = 0; q < pts; ++q)
      local += rule.w[q] * f(c + h * rule.x[q]);
    sum += h * local;
  }
  return sum;
}

std::vector<double> geometric_breakpoints(double r0, double r1, int n) {
  std::vector<double> out(n + 1);
  const double ratio = std::pow(r1 / r0, 1.0 / n);
  out[0] = r0;
  for (int i = 1; i < n; ++i)
    out[i] = r0 * std::pow(ratio, i);
  out[n] = r1;
  return out;
}

AngularGrid product_angular(int n_theta) {
  const int n_phi = 2 * n_theta;
  const QuadRule &rule = gauss_legendre(n_theta);
  AngularGrid grid;
  grid.dir.reserve(static_cast<std::size_t>(n_theta) * n_phi);
  grid.w.reserve(grid.dir.capacity());
  for (int i = 0; i < n_theta; ++i) {
    const double ct = rule.x[i];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int j = 0; j < n_phi; ++j) {
      const double phi = 2.0 * kPi * (j + 0.5) / n_phi;
      grid.dir.push_back(Vec3(st * std::cos(phi), st * std::sin(phi), ct));
      grid.w.push_back(rule.w[i] * 2.0 * kPi / n_phi);
    }
  }
  return grid;
}

std::vector<WeightedNode> spherical_grid(const SphericalGridSpec &spec) {
  std::vector<double> edges;
  edges.push_back(0.0);
  auto ladder = geometric_breakpoints(spec.r_first, spec.r_outer, spec.radial_intervals);
  edges.insert(edges.end(), ladder.begin(), ladder.end());

  const QuadRule &rule = gauss_legendre(spec.radial_pts);
  const AngularGrid ang = product_angular(spec.n_theta);

  std::vector<WeightedNode> nodes;
  nodes.reserve((edges.size() - 1) * spec.radial_pts * ang.dir.size());
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double h = 0.5 * (edges[i + 1] - edges[i]), c = 0.5 * (edges[i + 1] + edges[i]);
    for (int q = 0; q < spec.radial_pts; ++q) {
      const double r = c + h * rule.x[q];
      const double wr = h * rule.w[q] * r * r;
      for (std::size_t a = 0; a < ang.dir.size(); ++a)
        nodes.push_back({spec.center + r * ang.dir[a], wr * ang.w[a]});
    }
  }
  return nodes;
}

double integrate_spherical(const std::function<double(const Vec3 &)> &f,
                           const SphericalGridSpec &spec) {
  double sum = 0.0;
  for (const auto &node : spherical_grid(spec))
    sum += node.w * f(node.x);
  return sum;
}

double integrate_spherical_adaptive(const std::function<double(const Vec3 &)> &f,
                                    SphericalGridSpec spec, double rel_tol, double abs_floor,
                                    int max_refine) {
  double prev = integrate_spherical(f, spec);
  for (int level = 0; level < max_refine; ++level) {
    spec.radial_intervals *= 2;
    spec.n_theta += spec.n_theta / 2 + 1;
    const double cur = integrate_spherical(f, spec);
    const double scale = std::max(std::abs(cur), abs_floor);
    if (std::abs(cur - prev) <= rel_tol * scale)
      return cur;
    prev = cur;
  }
  throw SolverError("QuadratureFailure", "spherical quadrature did not reach target accuracy");
}

std::vector<double>
integrate_spherical_adaptive_multi(const std::function<void(const Vec3 &, double *)> &f,
                                   int n_components, SphericalGridSpec spec, double rel_tol,
                                   double abs_floor, int max_refine) {
  auto pass = [&](const SphericalGridSpec &s) {
    std::vector<double> acc(n_components, 0.0);
    std::vector<double> vals(n_components);
    for (const auto &node : spherical_grid(s)) {
      f(node.x, vals.data());
      for (int k = 0; k < n_components; ++k)
        acc[k] += node.w * vals[k];
    }
    return acc;
  };
  std::vector<double> prev = pass(spec);
  for (int level = 0; level < max_refine; ++level) {
    spec.radial_intervals *= 2;
    spec.n_theta += spec.n_theta / 2 + 1;
    std::vector<double> cur = pass(spec);
    bool ok = true;
    for (int k = 0; k < n_components; ++k) {
      const double scale = std::max(std::abs(cur[k]), abs_floor);
      if (std::abs(cur[k] - prev[k]) > rel_tol * scale)
        ok = false;
    }
    if (ok)
      return cur;
    prev = std::move(cur);
  }
  throw SolverError("QuadratureFailure", "spherical quadrature did not reach target accuracy");
}

double integrate_radial_to_infinity(const std::function<double(double)> &g, double a,
                                    double r_switch, const std::vector<double> &interior_breaks,
                                    int pts) {
  double head = 0.0;
  if (r_switch > a)
    head = integrate_1d(g, a, r_switch, interior_breaks, pts);
  // Tail via u = 1/r: integral over (0, 1/r_switch] of g(1/u)/u^2 du, split
  // geometrically toward u = 0 to keep algebraic tails cheap and accurate.
  const double u1 = 1.0 / std::max(r_switch, a);
  auto tail_f = [&g](double u) { return g(1.0 / u) / (u * u); };
  const auto breaks = geometric_breakpoints(u1 * 1e-12, u1, 24);
  double tail = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
    tail += integrate_1d(tail_f, breaks[i], breaks[i + 1], {}, pts);
  return head + tail;
}

} // namespace dgap
