// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <vector>

#include "dgap/charge_measure.hpp"

namespace dgap {

//! Bound-state energy of the attractive point-Coulomb radial problem with
//! coupling nu and spin-orbit number kappa at radial excitation n_r:
//!   E = (1 + nu^2 / (n_r + gamma)^2)^(-1/2),  gamma = sqrt(kappa^2 - nu^2).
//! n_r = 0 is admissible only for kappa < 0. Throws ValidationError
//! (Supercritical) when nu >= |kappa|.
double point_charge_level(double nu, int kappa, int n_r);

//! First `count` point-charge levels of a channel, ascending.
std::vector<double> point_charge_levels(double nu, int kappa, int count);

//! Description of a radial potential for the integrator: V(r) plus the radii
//! where its closed form changes, an optional Coulomb singularity weight at
//! the origin and the bounded remainder there.
struct RadialPotential {
  std::function<double(double)> V;
  std::vector<double> breakpoints;
  double atom_weight = 0.0;   // nu of the 1/r singularity at the center
  double bounded_at_zero = 0.0;
  double outermost = 0.0;     // last non-Coulomb feature radius
};

RadialPotential radial_potential(const ChargeMeasure &measure);

//! Outcome of one two-sided integration at energy E.
struct ChannelShot {
  double f_out, g_out;   // outward state at match_r (renormalized scale)
  double f_in, g_in;     // inward state at match_r (renormalized scale)
  double ratio_out;      // g/f log-derivative data at match_r
  double ratio_in;
  double defect;         // normalized Wronskian mismatch, 0 at an eigenvalue
  int nodes_out;         // sign changes of f along the full outward sweep
};

//! Integrates the radial system f' = -(kappa/r) f + (1+E+V) g,
//! g' = (kappa/r) g - (E-1+V) f outward from a series start and inward from
//! the exponential tail, meeting at match_r. rel_tol controls the embedded
//! RK error per step. Throws SolverError (SingularStart) when the series
//! start does not exist (atom with nu >= |kappa|) and BlowUp on overflow.
ChannelShot integrate_channel(const RadialPotential &pot, int kappa, double E, double match_r,
                              double rel_tol = 1e-12);

//! Eigenvalue inside (E_lo, E_hi): bisection on the defect sign then secant,
//! requiring |defect| < defect_tol at the result. Throws SolverError
//! (NoSignChange) when the bracket does not straddle a root.
double shoot_eigenvalue(const RadialPotential &pot, int kappa, double E_lo, double E_hi,
                        double defect_tol = 1e-10);

//! First `count` gap levels of the channel by node-count bisection plus
//! defect polish.
std::vector<double> reference_levels(const RadialPotential &pot, int kappa, int count);

//! Samples (r, f) of the matched eigenfunction at energy E on the outward
//! then inward sweep, globally rescaled to be continuous at match_r.
std::vector<std::pair<double, double>> eigenfunction_samples(const RadialPotential &pot,
                                                             int kappa, double E,
                                                             double match_r);

} // namespace dgap
