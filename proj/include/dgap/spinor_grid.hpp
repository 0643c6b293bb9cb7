// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <vector>

#include "dgap/charge_measure.hpp"

namespace dgap {

using CVec = std::vector<std::complex<double>>;

//! Periodic 4-spinor fields sampled on an N^3 lattice over [-L, L)^3 with
//! component-major storage (component, z, y, x). Momentum multipliers act on
//! the discrete Fourier lattice p = (pi / L) m, m in [-N/2, N/2)^3.
class SpinorGrid {
public:
  SpinorGrid(int n, double box_half_length);
  ~SpinorGrid();
  SpinorGrid(const SpinorGrid &) = delete;
  SpinorGrid &operator=(const SpinorGrid &) = delete;

  int n() const { return n_; }
  double box() const { return box_; }
  std::size_t points() const { return static_cast<std::size_t>(n_) * n_ * n_; }
  std::size_t field_size() const { return 4 * points(); }
  double cell_volume() const {
    const double h = 2.0 * box_ / n_;
    return h * h * h;
  }

  //! Lattice coordinate of grid index (ix, iy, iz).
  Vec3 node(int ix, int iy, int iz) const {
    const double h = 2.0 * box_ / n_;
    return Vec3(-box_ + h * ix, -box_ + h * iy, -box_ + h * iz);
  }
  //! Momentum of FFT index m (per axis), pi/L * signed frequency.
  double momentum(int m) const {
    const int f = m < n_ / 2 ? m : m - n_;
    return kPiOverL_ * f;
  }

  //! Discrete inner product (2L/N)^3 sum conj(a) b.
  std::complex<double> inner(const CVec &a, const CVec &b) const;
  double norm(const CVec &a) const;

  //! In-place unnormalized forward DFT per component; inverse applies 1/N^3.
  void forward(CVec &field) const;
  void inverse(CVec &field) const;

  //! (alpha p + beta + lambda) / (p^2 + 1 - lambda^2) momentum multiplier:
  //! the inverse of the free gap operator shifted by lambda.
  void apply_free_resolvent(CVec &field, double lambda) const;
  //! (alpha p + beta - lambda) momentum multiplier (forward operator).
  void apply_dirac_minus_lambda(CVec &field, double lambda) const;
  //! |p| momentum multiplier.
  void apply_abs_momentum(CVec &field) const;

  CVec make_field() const { return CVec(field_size()); }

private:
  struct Plans;
  int n_;
  double box_;
  double kPiOverL_;
  Plans *plans_;
};

//! min(V_mu, cap) sampled at the grid nodes; throws SolverError
//! (QuadratureNodeOnCenter) when a node coincides with an atom center.
std::vector<double> sampled_potential(const SpinorGrid &grid, const ChargeMeasure &measure,
                                      double cap);

} // namespace dgap
