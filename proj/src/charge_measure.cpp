// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0

#include "dgap/charge_measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <tuple>

#include "dgap/errors.hpp"

namespace dgap {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMergeScale = 1e12; // centers rounded at 1e-12

using CenterKey = std::tuple<std::int64_t, std::int64_t, std::int64_t>;

CenterKey center_key(const Vec3 &c) {
  return {std::llround(c[0] * kMergeScale), std::llround(c[1] * kMergeScale),
          std::llround(c[2] * kMergeScale)};
}

const Vec3 &component_center(const ChargeComponent &c) {
  return std::visit([](const auto &v) -> const Vec3 & { return v.center; }, c);
}

bool near_center(const Vec3 &x, const Vec3 &c) {
  return (x - c).norm() < 1e-13 * (1.0 + c.norm());
}

// Definite integral of s^p * rho(s) over [a, b] for a polynomial density.
double poly_moment(const std::vector<double> &coeffs, int p, double a, double b) {
  if (b <= a)
    return 0.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    const int q = static_cast<int>(k) + p + 1;
    sum += coeffs[k] * (std::pow(b, q) - std::pow(a, q)) / q;
  }
  return sum;
}

void check_finite(double v, const char *what) {
  if (!std::isfinite(v))
    throw ValidationError("BadComponent", std::string(what) + " is not finite");
}

[[noreturn]] void throw_negative() {
  throw ValidationError("NegativeComponent", "solver regime requires nonnegative components");
}

} // namespace

double RadialDensityPiece::density(double s) const {
  double v = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 0;)
    v = v * s + coeffs[k];
  return v;
}

double RadialDensityPiece::charge() const { return 4.0 * kPi * poly_moment(coeffs, 2, r0, r1); }

double RadialDensityPiece::inner_charge(double r) const {
  return 4.0 * kPi * poly_moment(coeffs, 2, r0, std::min(r, r1));
}

double RadialDensityPiece::outer_moment(double r) const {
  return 4.0 * kPi * poly_moment(coeffs, 1, std::max(r, r0), r1);
}

double ChargeMeasure::total_charge() const {
  double q = 0.0;
  for (const auto &c : components_) {
    std::visit(
        [&q](const auto &v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, RadialPiecewiseDensity>) {
            for (const auto &p : v.pieces)
              q += p.charge();
          } else {
            q += v.weight;
          }
        },
        c);
  }
  return q;
}

double ChargeMeasure::total_variation() const {
  double q = 0.0;
  for (const auto &c : components_) {
    std::visit(
        [&q](const auto &v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, RadialPiecewiseDensity>) {
            for (const auto &p : v.pieces)
              q += std::abs(p.charge());
          } else {
            q += std::abs(v.weight);
          }
        },
        c);
  }
  return q;
}

std::vector<AtomWeight> ChargeMeasure::atom_weights() const {
  std::map<CenterKey, AtomWeight> merged;
  for (const auto &c : components_) {
    if (const auto *p = std::get_if<PointCharge>(&c)) {
      auto [it, inserted] = merged.try_emplace(center_key(p->center), AtomWeight{p->center, 0.0});
      it->second.weight += p->weight;
      (void)inserted;
    }
  }
  std::vector<AtomWeight> out;
  out.reserve(merged.size());
  for (const auto &[key, atom] : merged)
    out.push_back(atom);
  return out;
}

void ChargeMeasure::validate(MeasureRegime regime) const {
  for (const auto &c : components_) {
    std::visit(
        [regime](const auto &v) {
          using T = std::decay_t<decltype(v)>;
          check_finite(v.center.sum(), "component center");
          if constexpr (std::is_same_v<T, PointCharge>) {
            check_finite(v.weight, "point weight");
          } else if constexpr (std::is_same_v<T, SphericalShell>) {
            check_finite(v.weight, "shell weight");
            check_finite(v.radius, "shell radius");
            if (v.radius <= 0.0)
              throw ValidationError("BadComponent", "shell radius must be positive");
          } else {
            if (v.pieces.empty())
              throw ValidationError("BadComponent", "density has no pieces");
            for (const auto &p : v.pieces) {
              check_finite(p.r0 + p.r1, "density piece bounds");
              if (p.r0 < 0.0 || p.r1 <= p.r0)
                throw ValidationError("BadComponent", "density piece bounds must be 0 <= r0 < r1");
              if (p.coeffs.empty())
                throw ValidationError("BadComponent", "density piece has no coefficients");
              for (double ck : p.coeffs)
                check_finite(ck, "density coefficient");
              // Sign-definiteness sampled on a fixed lattice per piece.
              bool has_pos = false, has_neg = false;
              for (int i = 0; i <= 64; ++i) {
                const double s = p.r0 + (p.r1 - p.r0) * i / 64.0;
                const double d = p.density(s);
                has_pos |= d > 1e-14;
                has_neg |= d < -1e-14;
              }
              if (has_pos && has_neg)
                throw ValidationError("MixedSignPiece", "density piece changes sign");
              if (regime == MeasureRegime::solver && has_neg)
                throw_negative();
            }
          }
          if constexpr (!std::is_same_v<T, RadialPiecewiseDensity>) {
            if (regime == MeasureRegime::solver && v.weight < 0.0)
              throw_negative();
          }
        },
        c);
  }
  for (const auto &atom : atom_weights()) {
    if (std::abs(atom.weight) >= 1.0)
      throw ValidationError("AtomTooHeavy",
                            "merged atom weight " + std::to_string(atom.weight) +
                                " has absolute value >= 1");
  }
  if (regime == MeasureRegime::solver && total_variation() == 0.0)
    throw ValidationError("TrivialMeasure", "measure is zero");
}

double ChargeMeasure::potential(const Vec3 &x) const {
  double v = 0.0;
  for (const auto &c : components_) {
    std::visit(
        [&](const auto &comp) {
          using T = std::decay_t<decltype(comp)>;
          const double r = (x - comp.center).norm();
          if constexpr (std::is_same_v<T, PointCharge>) {
            if (near_center(x, comp.center))
              throw SolverError("SingularPoint", "potential requested at an atom center");
            v += comp.weight / r;
          } else if constexpr (std::is_same_v<T, SphericalShell>) {
            v += comp.weight / std::max(r, comp.radius);
          } else {
            for (const auto &p : comp.pieces) {
              if (r == 0.0)
                v += p.outer_moment(0.0);
              else
                v += p.inner_charge(r) / r + p.outer_moment(r);
            }
          }
        },
        c);
  }
  return v;
}

bool ChargeMeasure::is_radial() const {
  if (components_.empty())
    return true;
  const auto key = center_key(component_center(components_.front()));
  return std::all_of(components_.begin(), components_.end(),
                     [&](const ChargeComponent &c) { return center_key(component_center(c)) == key; });
}

Vec3 ChargeMeasure::radial_center() const {
  if (!is_radial())
    throw ValidationError("NotRadial", "measure components have distinct centers");
  return components_.empty() ? Vec3::Zero().eval() : component_center(components_.front());
}

double ChargeMeasure::potential_radial(double r) const {
  if (!is_radial())
    throw ValidationError("NotRadial", "measure components have distinct centers");
  if (r < 0.0)
    throw ValidationError("BadComponent", "negative radius");
  double v = 0.0;
  for (const auto &c : components_) {
    std::visit(
        [&](const auto &comp) {
          using T = std::decay_t<decltype(comp)>;
          if constexpr (std::is_same_v<T, PointCharge>) {
            if (r < 1e-13 * (1.0 + comp.center.norm()))
              throw SolverError("SingularPoint", "radial potential requested at the atom");
            v += comp.weight / r;
          } else if constexpr (std::is_same_v<T, SphericalShell>) {
            v += comp.weight / std::max(r, comp.radius);
          } else {
            for (const auto &p : comp.pieces) {
              if (r == 0.0)
                v += p.outer_moment(0.0);
              else
                v += p.inner_charge(r) / r + p.outer_moment(r);
            }
          }
        },
        c);
  }
  return v;
}

std::vector<double> ChargeMeasure::radial_breakpoints() const {
  std::vector<double> bp;
  for (const auto &c : components_) {
    if (const auto *s = std::get_if<SphericalShell>(&c)) {
      bp.push_back(s->radius);
    } else if (const auto *d = std::get_if<RadialPiecewiseDensity>(&c)) {
      for (const auto &p : d->pieces) {
        if (p.r0 > 0.0)
          bp.push_back(p.r0);
        bp.push_back(p.r1);
      }
    }
  }
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  return bp;
}

double ChargeMeasure::enclosed_charge(double r) const {
  if (!is_radial())
    throw ValidationError("NotRadial", "measure components have distinct centers");
  double q = 0.0;
  for (const auto &c : components_) {
    std::visit(
        [&](const auto &comp) {
          using T = std::decay_t<decltype(comp)>;
          if constexpr (std::is_same_v<T, PointCharge>) {
            q += comp.weight;
          } else if constexpr (std::is_same_v<T, SphericalShell>) {
            if (comp.radius <= r)
              q += comp.weight;
          } else {
            for (const auto &p : comp.pieces)
              q += p.inner_charge(r);
          }
        },
        c);
  }
  return q;
}

double ChargeMeasure::central_atom_weight() const {
  const Vec3 c0 = radial_center();
  double w = 0.0;
  for (const auto &atom : atom_weights())
    if (near_center(atom.center, c0))
      w += atom.weight;
  return w;
}

double ChargeMeasure::bounded_potential_at_zero() const {
  if (!is_radial())
    throw ValidationError("NotRadial", "measure components have distinct centers");
  double v = 0.0;
  for (const auto &c : components_) {
    std::visit(
        [&v](const auto &comp) {
          using T = std::decay_t<decltype(comp)>;
          if constexpr (std::is_same_v<T, SphericalShell>) {
            v += comp.weight / comp.radius;
          } else if constexpr (std::is_same_v<T, RadialPiecewiseDensity>) {
            for (const auto &p : comp.pieces)
              v += p.outer_moment(0.0);
          }
        },
        c);
  }
  return v;
}

double ChargeMeasure::outermost_feature() const {
  double r = 0.0;
  for (const auto &c : components_) {
    if (const auto *s = std::get_if<SphericalShell>(&c))
      r = std::max(r, s->radius);
    else if (const auto *d = std::get_if<RadialPiecewiseDensity>(&c))
      for (const auto &p : d->pieces)
        r = std::max(r, p.r1);
  }
  return r;
}

RadialPiecewiseDensity make_uniform_ball(const Vec3 &center, double weight, double radius) {
  if (radius <= 0.0)
    throw ValidationError("BadComponent", "ball radius must be positive");
  const double rho = 3.0 * weight / (4.0 * kPi * radius * radius * radius);
  return RadialPiecewiseDensity{center, {RadialDensityPiece{0.0, radius, {rho}}}};
}

CappedRadialPotential::CappedRadialPotential(const ChargeMeasure &measure, double cap)
    : measure_(measure), cap_(cap) {
  if (!(cap > 0.0))
    throw ValidationError("BadComponent", "potential cap must be positive");
  measure.validate(MeasureRegime::solver);
  breakpoints_ = measure.radial_breakpoints();
  // Nonnegative radial measures have nonincreasing potential, so the cap is
  // active on exactly one initial interval [0, r_cap).
  const bool atom = measure.central_atom_weight() > 0.0;
  const double v0 = measure.bounded_potential_at_zero();
  if (atom || v0 > cap) {
    double lo = 1e-18, hi = std::max(1.0, 2.0 * measure.outermost_feature());
    while (measure.potential_radial(hi) >= cap)
      hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (measure.potential_radial(mid) > cap ? lo : hi) = mid;
    }
    cap_radius_ = 0.5 * (lo + hi);
    breakpoints_.push_back(cap_radius_);
    std::sort(breakpoints_.begin(), breakpoints_.end());
    breakpoints_.erase(std::unique(breakpoints_.begin(), breakpoints_.end()), breakpoints_.end());
  }
}

double CappedRadialPotential::operator()(double r) const {
  if (r <= cap_radius_)
    return cap_;
  return std::min(measure_.potential_radial(r), cap_);
}

} // namespace dgap
