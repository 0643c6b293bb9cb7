// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0

#include "dgap/trial_spinor.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace dgap {

namespace {

constexpr double kPi = std::numbers::pi;

// integral of poly_P(x-A) poly_Q(x-B) exp(-a|x-A|^2 - b|x-B|^2) dx for
// polys of degree at most one (index -1 means the constant 1).
double primitive_overlap(const GaussianPrimitive &p, const GaussianPrimitive &q) {
  const double a = p.alpha, b = q.alpha;
  const double s = a + b;
  const Vec3 ab = p.center - q.center;
  const Vec3 c = (a * p.center + b * q.center) / s;
  const double pref = std::exp(-a * b / s * ab.squaredNorm()) * std::pow(kPi / s, 1.5);
  if (p.poly < 0 && q.poly < 0) return pref;
  const Vec3 ca = c - p.center;
  const Vec3 cb = c - q.center;
  if (p.poly >= 0 && q.poly < 0) return ca[p.poly] * pref;
  if (p.poly < 0) return cb[q.poly] * pref;
  const double diag = (p.poly == q.poly) ? 1.0 / (2.0 * s) : 0.0;
  return (ca[p.poly] * cb[q.poly] + diag) * pref;
}

} // namespace

TrialSpinor::Value TrialSpinor::eval(const Vec3 &x) const {
  Value v;
  v.grad[0].setZero();
  v.grad[1].setZero();
  for (const auto &t : prims_) {
    const Vec3 y = x - t.center;
    const double g = t.coeff * std::exp(-t.alpha * y.squaredNorm());
    if (t.poly < 0) {
      v.comp[t.spinor] += g;
      v.grad[t.spinor] += -2.0 * t.alpha * g * y;
    } else {
      const double pg = y[t.poly] * g;
      v.comp[t.spinor] += pg;
      Vec3 gr = -2.0 * t.alpha * pg * y;
      gr[t.poly] += g;
      v.grad[t.spinor] += gr;
    }
  }
  return v;
}

std::array<std::complex<double>, 2> TrialSpinor::sigma_grad(const Value &v) {
  using C = std::complex<double>;
  const Vec3 &g0 = v.grad[0];
  const Vec3 &g1 = v.grad[1];
  return {C(g0[2] + g1[0], -g1[1]), C(g0[0] - g1[2], g0[1])};
}

double TrialSpinor::sigma_grad_sq(const Value &v) {
  const auto sg = sigma_grad(v);
  return std::norm(sg[0]) + std::norm(sg[1]);
}

std::complex<double> TrialSpinor::fourier(const Vec3 &p, int s) const {
  using C = std::complex<double>;
  C acc(0.0, 0.0);
  for (const auto &t : prims_) {
    if (t.spinor != s) continue;
    const double gauss = std::pow(kPi / t.alpha, 1.5) *
                         std::exp(-p.squaredNorm() / (4.0 * t.alpha));
    const C phase = std::polar(1.0, -p.dot(t.center));
    if (t.poly < 0) {
      acc += t.coeff * gauss * phase;
    } else {
      acc += t.coeff * gauss * phase * C(0.0, -p[t.poly] / (2.0 * t.alpha));
    }
  }
  return acc;
}

double TrialSpinor::fourier_density(const Vec3 &p) const {
  return std::norm(fourier(p, 0)) + std::norm(fourier(p, 1));
}

double TrialSpinor::norm2() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < prims_.size(); ++i) {
    for (std::size_t j = 0; j < prims_.size(); ++j) {
      if (prims_[i].spinor != prims_[j].spinor) continue;
      acc += prims_[i].coeff * prims_[j].coeff * primitive_overlap(prims_[i], prims_[j]);
    }
  }
  return acc;
}

double TrialSpinor::max_alpha() const {
  double m = 0.0;
  for (const auto &t : prims_) m = std::max(m, t.alpha);
  return m;
}

double TrialSpinor::min_alpha() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto &t : prims_) m = std::min(m, t.alpha);
  return m;
}

double TrialSpinor::max_center_radius() const {
  double m = 0.0;
  for (const auto &t : prims_) m = std::max(m, t.center.norm());
  return m;
}

TrialSpinor TrialSpinor::scaled(double t) const {
  std::vector<GaussianPrimitive> out = prims_;
  const double t32 = std::pow(t, 1.5);
  for (auto &g : out) {
    g.alpha *= t * t;
    g.center /= t;
    g.coeff *= (g.poly < 0) ? t32 : t32 * t;
  }
  return TrialSpinor(std::move(out));
}

TrialSpinor TrialSpinor::random(std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  std::vector<GaussianPrimitive> prims;

  if (seed % 4 == 3) {
    // Cusp-mimicking stack: concentric s Gaussians with geometrically spread
    // widths approximate a |x|^-1/2 style profile near the origin.
    const int n = 7;
    double alpha = 0.08 * (1.0 + 0.5 * unit(rng));
    const int sp = rng() & 1;
    for (int i = 0; i < n; ++i) {
      GaussianPrimitive g;
      g.alpha = alpha;
      g.poly = -1;
      g.spinor = sp;
      g.coeff = std::pow(alpha, 0.25);
      prims.push_back(g);
      alpha *= 3.4;
    }
    // A faint partner on the other component keeps both spinor entries live.
    GaussianPrimitive h;
    h.alpha = 0.7;
    h.poly = -1;
    h.spinor = 1 - sp;
    h.coeff = 0.15 * sym(rng);
    if (std::abs(h.coeff) > 1e-3) prims.push_back(h);
  } else {
    const int n = 3 + static_cast<int>(rng() % 4u);
    for (int i = 0; i < n; ++i) {
      GaussianPrimitive g;
      const double u = unit(rng);
      g.center = 1.5 * std::cbrt(u) * Vec3(sym(rng), sym(rng), sym(rng)).normalized();
      g.alpha = 0.4 * std::pow(2.5 / 0.4, unit(rng));
      g.poly = (unit(rng) < 0.6) ? -1 : static_cast<int>(rng() % 3u);
      g.spinor = rng() & 1;
      g.coeff = sym(rng);
      if (std::abs(g.coeff) < 0.05) g.coeff = 0.25;
      prims.push_back(g);
    }
  }
  return TrialSpinor(std::move(prims));
}

} // namespace dgap
