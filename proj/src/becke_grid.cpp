// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0

#include "dgap/becke_grid.hpp"

#include <cmath>

#include "dgap/errors.hpp"

namespace dgap {

namespace {

double soften(double mu, int iterations) {
  for (int i = 0; i < iterations; ++i)
    mu = 1.5 * mu - 0.5 * mu * mu * mu;
  return mu;
}

} // namespace

double becke_weight(const std::vector<Vec3> &centers, std::size_t k, const Vec3 &x,
                    int softening) {
  const std::size_t m = centers.size();
  if (m == 1)
    return 1.0;
  std::vector<double> dist(m);
  for (std::size_t i = 0; i < m; ++i)
    dist[i] = (x - centers[i]).norm();
  double total = 0.0;
  double mine = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double cell = 1.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i)
        continue;
      const double mu = (dist[i] - dist[j]) / (centers[i] - centers[j]).norm();
      cell *= 0.5 * (1.0 - soften(mu, softening));
    }
    total += cell;
    if (i == k)
      mine = cell;
  }
  if (total <= 0.0)
    return (k == 0) ? 1.0 : 0.0; // far field where every cell underflows
  return mine / total;
}

std::vector<WeightedNode> molecular_grid(const std::vector<Vec3> &centers,
                                         const MolecularGridSpec &spec) {
  if (centers.empty())
    throw ValidationError("BadMolecule", "molecular grid needs at least one center");
  if (spec.radial_n < 8 || spec.angular_n < 8)
    throw ValidationError("BadGridSpec", "molecular grid needs radial_n, angular_n >= 8");
  const double r_outer = (spec.r_outer > 0.0) ? spec.r_outer : 30.0;

  int n_theta = 2;
  while (2 * n_theta * n_theta < spec.angular_n)
    ++n_theta;
  const int radial_pts = 8;
  const int radial_intervals = std::max(2, spec.radial_n / radial_pts);

  std::vector<WeightedNode> nodes;
  for (std::size_t k = 0; k < centers.size(); ++k) {
    SphericalGridSpec s;
    s.center = centers[k];
    s.r_first = spec.r_first;
    s.r_outer = r_outer;
    s.radial_intervals = radial_intervals;
    s.radial_pts = radial_pts;
    s.n_theta = n_theta;
    for (const auto &node : spherical_grid(s)) {
      const double w = node.w * becke_weight(centers, k, node.x, spec.softening);
      if (w != 0.0)
        nodes.push_back({node.x, w});
    }
  }
  return nodes;
}

double grid_gaussian_check(const std::vector<WeightedNode> &nodes,
                           const std::vector<Vec3> &centers) {
  double acc = 0.0;
  for (const auto &node : nodes) {
    double f = 0.0;
    for (const auto &c : centers)
      f += std::exp(-(node.x - c).squaredNorm());
    acc += node.w * f;
  }
  return acc;
}

} // namespace dgap
