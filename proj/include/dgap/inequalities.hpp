// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "dgap/charge_measure.hpp"
#include "dgap/trial_spinor.hpp"

namespace dgap {

//! Momentum-space expectation (2 pi)^-3 integral of g(|p|) |phi_hat(p)|^2.
//! The angular integral is done in closed form pairwise over primitives,
//! the radial one by composite quadrature of the analytic transform.
double momentum_expectation(const TrialSpinor &phi,
                            const std::function<double(double)> &g);

struct KatoCheck {
  double momentum_side = 0.0; // constant * <|p|>
  double coulomb_side = 0.0;  // <1/|x|>
  double margin = 0.0;        // momentum_side - coulomb_side
  double norm2 = 0.0;
};
//! Relativistic kinetic bound on the Coulomb energy. The default constant is
//! the sharp pi/2; an override is accepted so harnesses can probe failure.
KatoCheck kato_margin(const TrialSpinor &phi, double constant = 1.5707963267948966);

struct HardyCheck {
  double kinetic_side = 0.0;   // integral |sigma.grad phi|^2 / (a + 1/r)
  double potential_side = 0.0; // integral |phi|^2 / r
  double a = 0.0;
  double margin = 0.0; // kinetic_side + a*norm2 - potential_side
  double h1_norm2 = 0.0;
};
HardyCheck hardy_dirac_margin(const TrialSpinor &phi, double a);
//! All requested a values in one quadrature pass.
std::vector<HardyCheck> hardy_dirac_margins(const TrialSpinor &phi,
                                            const std::vector<double> &as);

struct EmbeddingCheck {
  double vmu_norm2 = 0.0;   // integral |sigma.grad phi|^2/(1+V) + |phi|^2
  double h_half_norm2 = 0.0;
  double h1_norm2 = 0.0;
  double lower_margin = 0.0; // vmu_norm2 - h_half_norm2 / max(2, 16 mass)
  double upper_margin = 0.0; // h1_norm2 - vmu_norm2
};
//! Weighted Sobolev norm of the upper-spinor form and its two-sided comparison
//! with H^1/2 and H^1. A null measure means V identically zero.
EmbeddingCheck vmu_norm_and_embedding(const TrialSpinor &phi, const ChargeMeasure *mu);

struct GradientPotentialCheck {
  double integral = 0.0; // integral |grad (1+V)^alpha|^2 (log(1+V) at alpha 0)
  double bound = 0.0;    // constant * total mass
  double constant = 0.0;
  double mass = 0.0;
};
//! Constant of the gradient-potential bound, summed to relative 1e-12.
//! Throws SolverError (SeriesTruncationError) when alpha is too close to 1/2.
double gradient_potential_constant(double alpha);
//! Checks integral |grad (1+V_mu)^alpha|^2 <= C_alpha mu(R^3) for non-atomic
//! radial measures; alpha in [0, 1/2), alpha = 0 uses log(1+V_mu).
GradientPotentialCheck gradient_potential_check(const ChargeMeasure &mu, double alpha);

//! Smooth normalized partition of unity: Gaussian bumps plus a constant
//! background, J_k = g_k / sqrt(sum g_j^2). Gradients are analytic.
class SmoothPartition {
public:
  //! Bumps at the given centers with common width, plus the background term.
  SmoothPartition(std::vector<Vec3> centers, double width, double background = 0.25);

  std::size_t size() const { return centers_.size() + 1; }
  //! Values and gradients of every element at x.
  void eval(const Vec3 &x, std::vector<double> &j, std::vector<Vec3> &grad) const;

  //! Multiplies the background element by the given factor; a factor other
  //! than one breaks the closure relation on purpose (test hook).
  void break_closure(double factor) { defect_factor_ = factor; }

private:
  std::vector<Vec3> centers_;
  double width_;
  double background_;
  double defect_factor_ = 1.0;
};

//! Max over the sample points of the relative defect of the localization
//! identity sum_k |sigma.grad(J_k phi)|^2 = |sigma.grad phi|^2 +
//! |phi|^2 sum_k |grad J_k|^2. Throws ValidationError (PartitionNotUnity)
//! when sum J_k^2 deviates from 1 by more than 1e-12 at a sample point.
double ims_residual(const TrialSpinor &phi, const SmoothPartition &partition,
                    const std::vector<Vec3> &points);

//! Default sample cloud for ims_residual, sized to the trial's extent.
std::vector<Vec3> ims_sample_points(const TrialSpinor &phi);

} // namespace dgap
