// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "dgap/becke_grid.hpp"
#include "dgap/charge_measure.hpp"
#include "dgap/gap_minmax.hpp"
#include "dgap/trial_spinor.hpp"

namespace dgap {

//! Finite family of point charges: centers pairwise distinct, weights in (0,1).
struct MoleculeSpec {
  std::vector<Vec3> centers;
  std::vector<double> weights;

  void validate() const;
  std::size_t size() const { return centers.size(); }
  //! Minimum pairwise center distance (infinity for a single center).
  double d_min() const;
  double total_weight() const;
  double max_weight() const;
  ChargeMeasure measure() const;
  //! Sum over pairs of nu_m nu_l / |R_m - R_l|.
  double nuclear_repulsion() const;
  //! Same weights with every center multiplied by the factor.
  MoleculeSpec scaled(double factor) const;
  //! Same geometry rigidly shifted.
  MoleculeSpec translated(const Vec3 &shift) const;
};

struct MolecularBasisSpec {
  int J = 10;          // exponents alpha0 * beta^j, j = 0..J
  double beta = 3.0;
  double alpha0 = 0.02;
  int l_max = 1;       // 0, 1 or 2
};

struct Monomial {
  std::array<int, 3> p{0, 0, 0};
  double c = 1.0;
};

//! Normalized real solid-harmonic Gaussian scalar: poly(x - center) * gaussian.
struct ScalarGaussian {
  Vec3 center;
  double alpha = 1.0;
  std::vector<Monomial> poly;
  std::size_t center_index = 0;
};

//! Analytic overlap of two scalar Gaussians (monomial expansion, axiswise
//! Hermite recursion).
double scalar_overlap(const ScalarGaussian &a, const ScalarGaussian &b);

//! Per-center even-tempered Gaussian set, canonically orthogonalized. One
//! scalar set serves both spinor components; the spinor dimension is twice
//! the kept scalar dimension.
class MolecularBasis {
public:
  static MolecularBasis build(const MoleculeSpec &spec, const MolecularBasisSpec &bspec);

  const std::vector<ScalarGaussian> &functions() const { return fns_; }
  int raw_scalar_dim() const { return static_cast<int>(fns_.size()); }
  int kept_scalar_dim() const { return static_cast<int>(x_.cols()); }
  int spinor_dim() const { return 2 * kept_scalar_dim(); }
  //! Raw-to-orthonormal transform (columns span the kept subspace).
  const Eigen::MatrixXd &orthogonalizer() const { return x_; }
  //! Raw overlap condition number (max/min eigenvalue before pruning).
  double condition_number() const { return cond_; }
  double min_alpha() const;

  //! Values and Cartesian gradients of every raw function at x.
  void eval_raw(const Vec3 &x, double *val, double *gx, double *gy, double *gz) const;

private:
  std::vector<ScalarGaussian> fns_;
  Eigen::MatrixXd x_;
  double cond_ = 0.0;
};

//! Grid-assembled lambda-nonlinear pencil of the upper-spinor form in the
//! orthonormalized molecular basis (mass matrix = identity).
class MolecularPencil {
public:
  MolecularPencil(const MoleculeSpec &spec, const MolecularBasis &basis,
                  MolecularGridSpec grid_spec);

  int dimension() const { return 2 * kept_; }
  std::size_t node_count() const { return static_cast<std::size_t>(w_.size()); }
  //! Largest kinetic weight 1/(1 + lambda + V) over the nodes.
  double max_kinetic_weight(double lambda) const;

  Eigen::MatrixXcd matrix_at(double lambda) const;
  //! k smallest eigenvalues of the pencil matrix at lambda.
  std::vector<double> smallest_levels(double lambda, int k) const;

  const MoleculeSpec &molecule() const { return spec_; }
  const std::vector<WeightedNode> &nodes() const { return nodes_; }
  const Eigen::VectorXd &potentials() const { return v_; }

private:
  MoleculeSpec spec_;
  std::vector<WeightedNode> nodes_;
  int kept_ = 0;
  Eigen::MatrixXd f_, g_[3]; // node values / gradients, orthonormal basis
  Eigen::VectorXd w_, v_;
};

//! k-th gap level of the molecular pencil (kappa field is 0).
MinMaxLevel find_molecular_level(const MolecularPencil &pencil, int k, double tol);

struct PesRecord {
  double d = 0.0;
  double lambda1 = 0.0;
  double u_nuc = 0.0;
  double total = 0.0;
  double residual = 0.0;
  int basis_dim = 0;
  std::string status; // "ok" or the error name
};

struct PesOptions {
  MolecularBasisSpec basis;
  MolecularGridSpec grid;
  double tol = 1e-8;
};

//! Lowest level along a separation sweep: the unit template's geometry is
//! scaled to each separation; per-point failures are recorded, not rethrown.
std::vector<PesRecord> pes_sweep(const MoleculeSpec &unit_template,
                                 const std::vector<double> &separations,
                                 const PesOptions &opts);

//! Compactly supported smooth partition: one quintic-smoothstep bump per
//! center (identically 1 inside radius d_k/4, 0 outside d_k/2, d_k the
//! nearest-neighbor distance) plus the complement element.
class CompactPartition {
public:
  explicit CompactPartition(const MoleculeSpec &spec);

  std::size_t size() const { return radii_.size() + 1; }
  void eval(const Vec3 &x, std::vector<double> &j, std::vector<Vec3> &grad) const;
  //! Measured sum over elements of sup|grad J_k|^2 (dense radial sampling).
  double grad_sup_sq_sum() const { return grad_sup_sq_sum_; }

private:
  std::vector<Vec3> centers_;
  std::vector<std::array<double, 2>> radii_; // inner plateau, outer support
  double grad_sup_sq_sum_ = 0.0;
};

struct LocalizationCheck {
  double lambda = 0.0;
  double d = 0.0;        // minimum separation (0 recorded for one center)
  double nu_bar = 0.0;   // max weight
  double kappa_measured = 0.0;
  std::vector<double> margins; // one per trial, expected >= -tolerance
};

//! Margins of the localization lower bound
//!   q_lambda(phi) >= (1 - nu_bar^2) int |sigma.grad phi|^2/(2+V)
//!                    - (2 lambda + 2(M-1) nu_bar/d + kappa/(d^2(1+lambda))) int |phi|^2
//! on seeded Gaussian-mixture trials; the separation terms are dropped for one
//! center. All integrals use the molecular grid.
LocalizationCheck localization_margins(const MoleculeSpec &spec, double lambda,
                                       int n_trials, std::uint64_t seed,
                                       const MolecularGridSpec &grid_spec);

} // namespace dgap
