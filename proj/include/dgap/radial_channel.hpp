// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <functional>
#include <optional>

#include "dgap/bspline.hpp"
#include "dgap/charge_measure.hpp"

namespace dgap {

//! Guard width of the spectral gap: admissible lambda lie in
//! (-1 + kGapGuard, 1 - kGapGuard).
inline constexpr double kGapGuard = 1e-6;

//! Smallest k eigenvalues of A x = m M x (ascending). M must be positive
//! definite; throws SolverError (NotPositiveDefinite) otherwise.
Eigen::VectorXd smallest_generalized_eigenvalues(const Eigen::MatrixXd &A,
                                                 const Eigen::MatrixXd &M, int k);

//! One spin-orbit channel of the gap quadratic form over a B-spline basis:
//!   A(lambda) = S(lambda) + (1 - lambda) M - P
//! with S the 1/(1+lambda+V)-weighted stiffness of f' + kappa f / r, M the
//! mass matrix and P the V-weighted mass matrix. Matrices are banded with
//! bandwidth = spline order; assembly quadrature is Gauss-Legendre per mesh
//! interval, split at potential breakpoints.
class ChannelPencil {
public:
  ChannelPencil(const ChargeMeasure &measure, int kappa, const RadialBasisSpec &basis_spec,
                std::optional<double> potential_cap = std::nullopt, int quad_pts = 0);

  //! Test/bypass hook: assemble directly from a radial potential functor.
  ChannelPencil(std::function<double(double)> potential, std::vector<double> breakpoints,
                int kappa, const RadialBasisSpec &basis_spec, int quad_pts = 0);

  int dim() const { return basis_.dimension(); }
  int kappa() const { return kappa_; }
  const RadialBasis &basis() const { return basis_; }
  const Eigen::MatrixXd &mass() const { return mass_; }
  const Eigen::MatrixXd &potential_matrix() const { return pot_; }

  //! A(lambda); lambda must lie inside the guarded gap.
  Eigen::MatrixXd matrix_at(double lambda) const;

  //! Smallest k generalized eigenvalues of (A(lambda), M) using the cached
  //! Cholesky factor of M.
  Eigen::VectorXd smallest_levels(double lambda, int k) const;

  //! Value of the channel form on coefficient vector c at lambda.
  double form_value(const Eigen::VectorXd &c, double lambda) const {
    return c.dot(matrix_at(lambda) * c);
  }

private:
  struct Node {
    double r;
    double w;
    double V;
    int first_full;
    int count;
    std::array<double, RadialBasis::kMaxOrder> b;
    std::array<double, RadialBasis::kMaxOrder> u; // b' + kappa b / r
  };

  void build_nodes(const std::function<double(double)> &potential,
                   const std::vector<double> &pot_breaks, int quad_pts);
  void assemble_static();

  int kappa_;
  RadialBasis basis_;
  std::vector<Node> nodes_;
  Eigen::MatrixXd mass_;
  Eigen::MatrixXd pot_;
  Eigen::LLT<Eigen::MatrixXd> mass_llt_;
};

} // namespace dgap
