// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "dgap/quadrature.hpp"

namespace dgap {

//! Molecular quadrature spec. radial_n is the per-center radial node count,
//! angular_n the approximate per-sphere node count. r_outer = 0 lets the
//! builder pick the extent from the basis it is meant to integrate.
struct MolecularGridSpec {
  int radial_n = 80;
  int angular_n = 110;
  double r_first = 1.37e-5;
  double r_outer = 0.0;
  int softening = 3;
};

//! Smooth fuzzy-cell weight of center k at x: iterated-polynomial switching
//! on the pairwise hyperbolic coordinates, normalized over centers.
double becke_weight(const std::vector<Vec3> &centers, std::size_t k, const Vec3 &x,
                    int softening);

//! Union of per-center radial-angular grids with fuzzy-cell weights folded in.
//! Node order is deterministic: centers in order, radial outward, angles fixed.
std::vector<WeightedNode> molecular_grid(const std::vector<Vec3> &centers,
                                         const MolecularGridSpec &spec);

//! Grid integral of sum_m exp(-|x - R_m|^2), for accuracy audits against
//! the exact M * pi^(3/2).
double grid_gaussian_check(const std::vector<WeightedNode> &nodes,
                           const std::vector<Vec3> &centers);

} // namespace dgap
