// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0

#include "dgap/inequalities.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "dgap/errors.hpp"
#include "dgap/quadrature.hpp"

namespace dgap {

namespace {

constexpr double kPi = std::numbers::pi;
using C = std::complex<double>;

// Spherical Bessel j0, j1 with small-argument series to avoid cancellation.
double sph_j0(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

// j1(x)/x, finite at 0.
double sph_j1_over_x(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 / 3.0 - x2 / 30.0 + x2 * x2 / 840.0;
  }
  return (std::sin(x) / x - std::cos(x)) / (x * x);
}

// Angular integrals over the unit sphere against exp(-i p n.d):
//   A      = int dOmega exp(...)
//   B_a    = int dOmega n_a exp(...)
//   C_ab   = int dOmega n_a n_b exp(...)
struct PhaseAngular {
  C a;
  Eigen::Matrix<C, 3, 1> b;
  Eigen::Matrix<C, 3, 3> c;
};

PhaseAngular phase_angular(double p, const Vec3 &d) {
  PhaseAngular out;
  const double dn = d.norm();
  const double x = p * dn;
  const Vec3 u = (dn > 0.0) ? Vec3(d / dn) : Vec3(0, 0, 1);
  const double j0 = sph_j0(x);
  const double j1x = sph_j1_over_x(x);
  out.a = 4.0 * kPi * j0;
  const double j1 = x * j1x;
  for (int i = 0; i < 3; ++i)
    out.b(i) = C(0.0, -4.0 * kPi * j1 * u[i]);
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      const double del = (i == k) ? 1.0 : 0.0;
      out.c(i, k) = 4.0 * kPi * ((del - u[i] * u[k]) * j1x + u[i] * u[k] * (j0 - 2.0 * j1x));
    }
  return out;
}

// Radial profile R(p) = int dOmega |phi_hat(p n)|^2, assembled pairwise.
double fourier_shell_density(const TrialSpinor &phi, double p) {
  const auto &prims = phi.primitives();
  C acc(0.0, 0.0);
  for (std::size_t i = 0; i < prims.size(); ++i) {
    for (std::size_t k = 0; k < prims.size(); ++k) {
      const auto &t = prims[i];
      const auto &u = prims[k];
      if (t.spinor != u.spinor)
        continue;
      const double gt = std::pow(kPi / t.alpha, 1.5) * std::exp(-p * p / (4.0 * t.alpha));
      const double gu = std::pow(kPi / u.alpha, 1.5) * std::exp(-p * p / (4.0 * u.alpha));
      const double pref = t.coeff * u.coeff * gt * gu;
      if (pref == 0.0)
        continue;
      const PhaseAngular ang = phase_angular(p, t.center - u.center);
      if (t.poly < 0 && u.poly < 0) {
        acc += pref * ang.a;
      } else if (t.poly >= 0 && u.poly < 0) {
        acc += pref * C(0.0, -p / (2.0 * t.alpha)) * ang.b(t.poly);
      } else if (t.poly < 0) {
        acc += pref * C(0.0, p / (2.0 * u.alpha)) * ang.b(u.poly);
      } else {
        acc += pref * (p * p / (4.0 * t.alpha * u.alpha)) * ang.c(t.poly, u.poly);
      }
    }
  }
  return acc.real();
}

double momentum_outer(const TrialSpinor &phi) {
  return 8.0 * std::sqrt(2.0 * std::max(phi.max_alpha(), 0.05)) + 8.0;
}

SphericalGridSpec position_spec(const TrialSpinor &phi) {
  SphericalGridSpec spec;
  spec.center = Vec3::Zero();
  spec.r_outer = phi.max_center_radius() + 9.0 / std::sqrt(std::max(phi.min_alpha(), 1e-3));
  spec.r_first = 1e-3;
  spec.radial_intervals = 24;
  spec.radial_pts = 8;
  spec.n_theta = 12;
  return spec;
}

} // namespace

double momentum_expectation(const TrialSpinor &phi, const std::function<double(double)> &g) {
  const double p_max = momentum_outer(phi);
  auto integrand = [&](double p) {
    return g(p) * p * p * fourier_shell_density(phi, p);
  };
  // Uniform panels sized to the narrowest momentum feature: the central bump
  // of the widest primitive (scale sqrt(2 alpha_min)) and the j0/j1
  // oscillation set by the center offsets (wavelength 2 pi / |c_i - c_j|).
  const double feature = std::min(0.35 * std::sqrt(2.0 * std::max(phi.min_alpha(), 1e-4)), 0.5);
  const int panels = std::clamp(static_cast<int>(std::ceil(p_max / feature)), 48, 6000);
  std::vector<double> breaks;
  for (int i = 1; i < panels; ++i)
    breaks.push_back(p_max * i / panels);
  const double coarse = integrate_1d(integrand, 0.0, p_max, breaks, 8);
  const double fine = integrate_1d(integrand, 0.0, p_max, breaks, 12);
  const double scale = std::max(std::abs(fine), 1e-12 * std::max(1.0, phi.norm2()));
  if (std::abs(fine - coarse) > 1e-10 * scale)
    throw SolverError("QuadratureFailure", "momentum quadrature did not reach target accuracy");
  return fine / std::pow(2.0 * kPi, 3);
}

KatoCheck kato_margin(const TrialSpinor &phi, double constant) {
  KatoCheck out;
  out.norm2 = phi.norm2();
  if (!(out.norm2 > 0.0))
    throw ValidationError("TrivialTrial", "kato_margin needs a nonzero trial");
  out.momentum_side = constant * momentum_expectation(phi, [](double p) { return p; });
  auto spec = position_spec(phi);
  out.coulomb_side = integrate_spherical_adaptive(
      [&](const Vec3 &x) {
        return TrialSpinor::density(phi.eval(x)) / std::max(x.norm(), 1e-300);
      },
      spec, 1e-10, 1e-10 * out.norm2);
  out.margin = out.momentum_side - out.coulomb_side;
  return out;
}

std::vector<HardyCheck> hardy_dirac_margins(const TrialSpinor &phi,
                                            const std::vector<double> &as) {
  for (double a : as)
    if (a < 0.0)
      throw ValidationError("BadParameter", "hardy_dirac_margin needs a >= 0");
  const double norm2 = phi.norm2();
  const int n = static_cast<int>(as.size());
  // Components: per-a kinetic integral, then <1/r>, then |grad phi|^2.
  auto f = [&](const Vec3 &x, double *out) {
    const auto v = phi.eval(x);
    const double r = std::max(x.norm(), 1e-300);
    const double kin = TrialSpinor::sigma_grad_sq(v);
    for (int i = 0; i < n; ++i)
      out[i] = kin * r / (as[static_cast<std::size_t>(i)] * r + 1.0);
    out[n] = TrialSpinor::density(v) / r;
    out[n + 1] = TrialSpinor::grad_sq(v);
  };
  const auto vals = integrate_spherical_adaptive_multi(f, n + 2, position_spec(phi), 1e-10,
                                                       1e-10 * std::max(norm2, 1.0));
  std::vector<HardyCheck> checks(as.size());
  for (std::size_t i = 0; i < as.size(); ++i) {
    auto &c = checks[i];
    c.a = as[i];
    c.kinetic_side = vals[i];
    c.potential_side = vals[as.size()];
    c.h1_norm2 = vals[as.size() + 1] + norm2;
    c.margin = c.kinetic_side + c.a * norm2 - c.potential_side;
  }
  return checks;
}

HardyCheck hardy_dirac_margin(const TrialSpinor &phi, double a) {
  return hardy_dirac_margins(phi, {a}).front();
}

EmbeddingCheck vmu_norm_and_embedding(const TrialSpinor &phi, const ChargeMeasure *mu) {
  if (mu)
    mu->validate(MeasureRegime::solver);
  EmbeddingCheck out;
  const double norm2 = phi.norm2();
  auto f = [&](const Vec3 &x, double *vals) {
    const auto v = phi.eval(x);
    const double pot = mu ? mu->potential(x) : 0.0;
    vals[0] = TrialSpinor::sigma_grad_sq(v) / (1.0 + pot);
  };
  const auto ints = integrate_spherical_adaptive_multi(f, 1, position_spec(phi), 1e-10,
                                                       1e-10 * std::max(norm2, 1.0));
  out.vmu_norm2 = ints[0] + norm2;
  out.h_half_norm2 =
      momentum_expectation(phi, [](double p) { return std::sqrt(1.0 + p * p); });
  out.h1_norm2 = momentum_expectation(phi, [](double p) { return 1.0 + p * p; });
  const double mass = mu ? mu->total_charge() : 0.0;
  out.lower_margin = out.vmu_norm2 - out.h_half_norm2 / std::max(2.0, 16.0 * mass);
  out.upper_margin = out.h1_norm2 - out.vmu_norm2;
  return out;
}

double gradient_potential_constant(double alpha) {
  if (alpha < 0.0 || alpha >= 0.5)
    throw ValidationError("BadParameter", "gradient-potential bound needs alpha in [0, 1/2)");
  double sum = 1.0;
  for (long i = 1; i <= 200000; ++i) {
    // 2 * 2^(i-1) / (1 + 2^(i-1))^(2-2a), written overflow-free:
    // 2 * 2^((i-1)(2a-1)) * (2^(i-1)/(1+2^(i-1)))^(2-2a).
    const double decay = std::exp2(static_cast<double>(i - 1) * (2.0 * alpha - 1.0));
    const double shape =
        std::exp(-(2.0 - 2.0 * alpha) * std::log1p(std::exp2(static_cast<double>(1 - i))));
    const double term = 2.0 * decay * shape;
    sum += term;
    if (term <= 1e-14 * sum) {
      const double pref = (alpha == 0.0) ? 4.0 * kPi : 4.0 * kPi * alpha * alpha;
      return pref * sum;
    }
  }
  throw SolverError("SeriesTruncationError",
                    "constant series converges too slowly for this alpha");
}

GradientPotentialCheck gradient_potential_check(const ChargeMeasure &mu, double alpha) {
  mu.validate(MeasureRegime::solver);
  if (!mu.atom_weights().empty())
    throw ValidationError("AtomicComponent",
                          "gradient-potential bound needs a non-atomic measure");
  if (!mu.is_radial())
    throw ValidationError("NotRadial", "gradient-potential bound needs a radial measure");

  GradientPotentialCheck out;
  out.constant = gradient_potential_constant(alpha);
  out.mass = mu.total_charge();
  out.bound = out.constant * out.mass;

  // |d/dr W|^2 with W = (1+V)^alpha or log(1+V); V' = -Q(r)/r^2.
  auto integrand = [&](double r) {
    const double q = mu.enclosed_charge(r);
    if (q == 0.0)
      return 0.0;
    const double v = mu.potential_radial(r);
    const double w = (alpha == 0.0) ? 1.0 / (1.0 + v) : alpha * std::pow(1.0 + v, alpha - 1.0);
    const double slope = w * q / (r * r);
    return 4.0 * kPi * r * r * slope * slope;
  };
  auto bp = mu.radial_breakpoints();
  const double inner = bp.empty() ? 1.0 : bp.front();
  const double outer = std::max(mu.outermost_feature(), inner) + 10.0;
  auto dense = geometric_breakpoints(inner / 32.0, outer, 48);
  bp.insert(bp.end(), dense.begin(), dense.end());
  std::sort(bp.begin(), bp.end());
  out.integral = integrate_radial_to_infinity(integrand, 0.0, outer, bp, 12);
  return out;
}

SmoothPartition::SmoothPartition(std::vector<Vec3> centers, double width, double background)
    : centers_(std::move(centers)), width_(width), background_(background) {
  if (width_ <= 0.0 || background_ <= 0.0)
    throw ValidationError("BadParameter", "partition needs positive width and background");
}

void SmoothPartition::eval(const Vec3 &x, std::vector<double> &j,
                           std::vector<Vec3> &grad) const {
  const std::size_t m = centers_.size();
  j.resize(m + 1);
  grad.resize(m + 1);
  std::vector<double> g(m + 1);
  std::vector<Vec3> dg(m + 1);
  double s2 = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const Vec3 y = x - centers_[k];
    g[k] = std::exp(-y.squaredNorm() / (2.0 * width_ * width_));
    dg[k] = -(y / (width_ * width_)) * g[k];
    s2 += g[k] * g[k];
  }
  g[m] = background_;
  dg[m].setZero();
  s2 += g[m] * g[m];
  const double s = std::sqrt(s2);
  Vec3 sgrad = Vec3::Zero(); // grad s = (sum g_j dg_j) / s
  for (std::size_t k = 0; k < m; ++k)
    sgrad += g[k] * dg[k];
  sgrad /= s;
  for (std::size_t k = 0; k <= m; ++k) {
    j[k] = g[k] / s;
    grad[k] = dg[k] / s - g[k] * sgrad / s2;
  }
  j[m] *= defect_factor_;
  grad[m] *= defect_factor_;
}

std::vector<Vec3> ims_sample_points(const TrialSpinor &phi) {
  SphericalGridSpec spec = position_spec(phi);
  spec.radial_intervals = 10;
  spec.radial_pts = 4;
  spec.n_theta = 6;
  std::vector<Vec3> pts;
  for (const auto &node : spherical_grid(spec))
    pts.push_back(node.x);
  return pts;
}

double ims_residual(const TrialSpinor &phi, const SmoothPartition &partition,
                    const std::vector<Vec3> &points) {
  std::vector<double> j;
  std::vector<Vec3> grad;
  double worst = 0.0;
  for (const Vec3 &x : points) {
    partition.eval(x, j, grad);
    double closure = 0.0;
    for (double v : j)
      closure += v * v;
    if (std::abs(closure - 1.0) > 1e-12)
      throw ValidationError("PartitionNotUnity", "partition closure fails at a sample point");

    const auto v = phi.eval(x);
    const auto sg = TrialSpinor::sigma_grad(v);
    const double dens = TrialSpinor::density(v);
    double lhs = 0.0;
    double grad_sum = 0.0;
    for (std::size_t k = 0; k < j.size(); ++k) {
      // sigma.grad(J_k phi) = J_k sigma.grad(phi) + (sigma.grad J_k) phi
      const Vec3 &a = grad[k];
      const C c0 = j[k] * sg[0] + C(a[2] * v.comp[0], 0.0) + C(a[0], -a[1]) * v.comp[1];
      const C c1 = j[k] * sg[1] + C(a[0], a[1]) * v.comp[0] - C(a[2] * v.comp[1], 0.0);
      lhs += std::norm(c0) + std::norm(c1);
      grad_sum += a.squaredNorm();
    }
    const double rhs = std::norm(sg[0]) + std::norm(sg[1]) + dens * grad_sum;
    const double mag = std::norm(sg[0]) + std::norm(sg[1]) + dens * grad_sum + 1e-280;
    worst = std::max(worst, std::abs(lhs - rhs) / mag);
  }
  return worst;
}

} // namespace dgap
