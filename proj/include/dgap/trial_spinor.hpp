// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "dgap/charge_measure.hpp"

namespace dgap {

//! One primitive: coeff * poly(x - center) * exp(-alpha |x - center|^2) on one
//! spinor component. poly = -1 is the constant 1; poly in {0,1,2} picks the
//! linear factor (x - center)_poly.
struct GaussianPrimitive {
  Vec3 center = Vec3::Zero();
  double alpha = 1.0;
  int poly = -1;
  int spinor = 0; // 0 or 1
  double coeff = 1.0;
};

//! Real-coefficient two-spinor built from Gaussian primitives, with analytic
//! gradient, Fourier transform and L^2 norm.
class TrialSpinor {
public:
  TrialSpinor() = default;
  explicit TrialSpinor(std::vector<GaussianPrimitive> prims) : prims_(std::move(prims)) {}

  const std::vector<GaussianPrimitive> &primitives() const { return prims_; }

  struct Value {
    std::array<double, 2> comp{};        // phi_s(x)
    std::array<Vec3, 2> grad{};          // grad phi_s(x)
  };
  Value eval(const Vec3 &x) const;

  //! |phi|^2 at x.
  static double density(const Value &v) {
    return v.comp[0] * v.comp[0] + v.comp[1] * v.comp[1];
  }
  //! sigma.grad phi (2 complex components) from an evaluated Value.
  static std::array<std::complex<double>, 2> sigma_grad(const Value &v);
  //! |sigma.grad phi|^2 at x.
  static double sigma_grad_sq(const Value &v);
  //! |grad phi|^2 at x.
  static double grad_sq(const Value &v) {
    return v.grad[0].squaredNorm() + v.grad[1].squaredNorm();
  }

  //! Fourier transform of component s at momentum p (convention
  //! integral of phi exp(-i p.x) dx).
  std::complex<double> fourier(const Vec3 &p, int s) const;
  //! |phi_hat(p)|^2 summed over components.
  double fourier_density(const Vec3 &p) const;

  //! Analytic L^2 norm squared.
  double norm2() const;

  double max_alpha() const;
  double min_alpha() const;
  double max_center_radius() const;

  //! Unitary dilation phi_t(x) = t^(3/2) phi(t x).
  TrialSpinor scaled(double t) const;

  //! Seeded random trial from a mixed family: multi-center low-order
  //! Gaussians and single-center cusp-mimicking stacks.
  static TrialSpinor random(std::uint64_t seed);

private:
  std::vector<GaussianPrimitive> prims_;
};

} // namespace dgap
