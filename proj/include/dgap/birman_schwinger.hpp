// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>

#include "dgap/spinor_grid.hpp"

namespace dgap {

//! K_lambda = sqrt(V) (D0 - lambda)^(-1) sqrt(V) on the periodic spinor grid,
//! with V = min(V_mu, cap) sampled at the nodes.
class BsOperator {
public:
  BsOperator(const SpinorGrid &grid, const ChargeMeasure &measure, double lambda, double cap);

  const SpinorGrid &grid() const { return grid_; }
  double lambda() const { return lambda_; }

  //! out = K_lambda in.
  void apply(const CVec &in, CVec &out) const;
  //! out = (K_lambda - 1)^2 in.
  void apply_shifted_square(const CVec &in, CVec &out) const;
  //! out = K_lambda^2 in.
  void apply_square(const CVec &in, CVec &out) const;

private:
  const SpinorGrid &grid_;
  double lambda_;
  std::vector<double> sqrt_v_;
};

struct LanczosEstimate {
  double value = 0.0;          // extremal Ritz value of the iterated operator
  double residual = 0.0;       // ||B v - value v|| / ||v|| at the returned vector
  int iterations = 0;          // total operator applications
  std::vector<double> trace;   // Ritz value after each restart cycle
  CVec vector;                 // converged Ritz vector
};

//! Largest (want_largest) or smallest eigenvalue of a self-adjoint PSD
//! operator by restarted Lanczos with full reorthogonalization. Throws
//! SolverError (Stagnation) when target_residual is not reached within
//! max_iterations operator applications.
LanczosEstimate lanczos_extremal(const SpinorGrid &grid,
                                 const std::function<void(const CVec &, CVec &)> &op,
                                 bool want_largest, std::uint64_t seed, int max_iterations,
                                 double target_residual);

struct BsNormEstimate {
  double estimate = 0.0;  // sqrt of the largest Ritz value of K^2; lower bound on ||K||
  double residual = 0.0;
  int iterations = 0;
  std::vector<double> trace;
};

//! Lower-bound estimate of ||K_lambda|| from Lanczos on K^2.
BsNormEstimate bs_norm_estimate(const BsOperator &op, std::uint64_t seed, int max_iterations,
                                double target_residual = 1e-6);

struct BsEigenCheck {
  double eigenvalue_nearest_one = 0.0; // Rayleigh quotient of K on the Ritz vector
  double defect = 0.0;                 // |eigenvalue - 1|
  double residual = 0.0;
  double localization_radius = 0.0;    // rms radius of the Ritz vector density
  int iterations = 0;
};

//! Eigenvalue of K_lambda nearest 1 via the smallest eigenvalue of (K - 1)^2.
BsEigenCheck bs_eigen_check(const BsOperator &op, std::uint64_t seed, int max_iterations,
                            double target_residual = 1e-6);

} // namespace dgap
