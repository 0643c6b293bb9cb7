// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <optional>
#include <variant>
#include <vector>

namespace dgap {

using Vec3 = Eigen::Vector3d;

//! Point charge of given weight (total charge) at a center.
struct PointCharge {
  Vec3 center;
  double weight;
};

//! Uniform charged sphere surface; weight is the total charge.
//! Potential is weight / max(|x - center|, radius).
struct SphericalShell {
  Vec3 center;
  double weight;
  double radius;
};

//! One polynomial piece of a radial volume density: rho(s) = sum_k coeffs[k] s^k
//! on [r0, r1]. The piece must not change sign on its interval.
struct RadialDensityPiece {
  double r0;
  double r1;
  std::vector<double> coeffs;

  double density(double s) const;
  //! Total charge of the piece, integral of 4 pi s^2 rho over [r0, r1].
  double charge() const;
  //! Integral of 4 pi s^2 rho over [r0, min(r, r1)].
  double inner_charge(double r) const;
  //! Integral of 4 pi s rho over [max(r, r0), r1].
  double outer_moment(double r) const;
};

//! Compactly supported piecewise-polynomial radial density about a center.
struct RadialPiecewiseDensity {
  Vec3 center;
  std::vector<RadialDensityPiece> pieces;
};

using ChargeComponent = std::variant<PointCharge, SphericalShell, RadialPiecewiseDensity>;

//! Validation strictness. The extension regime only needs finite variation and
//! every atom below unit weight; the solver regime additionally requires a
//! nonnegative, nontrivial measure.
enum class MeasureRegime { extension, solver };

struct AtomWeight {
  Vec3 center;
  double weight;
};

//! Finite charge measure: a finite list of components. Potentials are the
//! Coulomb convolution weight / distance evaluated in closed form per component.
class ChargeMeasure {
public:
  ChargeMeasure() = default;
  explicit ChargeMeasure(std::vector<ChargeComponent> components)
      : components_(std::move(components)) {}

  const std::vector<ChargeComponent> &components() const { return components_; }
  void add(ChargeComponent c) { components_.push_back(std::move(c)); }

  //! Signed total charge mu(R^3).
  double total_charge() const;
  //! Total variation |mu|(R^3): sum of absolute piece/component charges.
  double total_variation() const;

  //! Point components merged by center (coordinates rounded at 1e-12).
  std::vector<AtomWeight> atom_weights() const;

  //! Throws ValidationError (AtomTooHeavy / NegativeComponent / TrivialMeasure /
  //! BadDensityPiece) when the measure is outside the requested regime.
  void validate(MeasureRegime regime) const;

  //! V_mu(x). Throws SolverError (SingularPoint) when x hits an atom center.
  double potential(const Vec3 &x) const;

  //! True when every component shares one center (after 1e-12 rounding).
  bool is_radial() const;
  //! Common center of a radial measure; throws NotRadial otherwise.
  Vec3 radial_center() const;

  //! V_mu at distance r from the common center. r = 0 with an atom present
  //! throws SingularPoint.
  double potential_radial(double r) const;

  //! Radii (about the common center) where the closed form changes:
  //! shell radii and density piece bounds. Sorted, deduplicated, positive.
  std::vector<double> radial_breakpoints() const;

  //! Charge of the radial measure inside the closed ball of radius r about the
  //! common center. For a radial measure -enclosed_charge(r) / r^2 is the
  //! derivative of the radial potential away from breakpoints.
  double enclosed_charge(double r) const;

  //! Weight of the atom sitting at the common center (0 when none).
  double central_atom_weight() const;
  //! Potential of the non-atomic part at the common center (finite).
  double bounded_potential_at_zero() const;
  //! Largest radius at which the potential is not yet pure Coulomb tail:
  //! max shell radius / density support end; 0 for a pure point measure.
  double outermost_feature() const;

private:
  std::vector<ChargeComponent> components_;
};

//! Uniform ball of given total charge and radius, as a one-piece density.
RadialPiecewiseDensity make_uniform_ball(const Vec3 &center, double weight, double radius);

//! min(V, cap) of a radial solver-regime measure, with the cap crossing radius
//! (V is nonincreasing) appended to the breakpoint list when the cap is active.
class CappedRadialPotential {
public:
  CappedRadialPotential(const ChargeMeasure &measure, double cap);

  double operator()(double r) const;
  double cap() const { return cap_; }
  //! Breakpoints of the capped potential, including the cap crossing radius.
  const std::vector<double> &breakpoints() const { return breakpoints_; }

private:
  const ChargeMeasure &measure_;
  double cap_;
  double cap_radius_ = 0.0;
  std::vector<double> breakpoints_;
};

} // namespace dgap
