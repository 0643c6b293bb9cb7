// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0

#include "dgap/birman_schwinger.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "dgap/errors.hpp"

namespace dgap {

BsOperator::BsOperator(const SpinorGrid &grid, const ChargeMeasure &measure, double lambda,
                       double cap)
    : grid_(grid), lambda_(lambda) {
  auto v = sampled_potential(grid, measure, cap);
  sqrt_v_.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    sqrt_v_[i] = std::sqrt(v[i]);
}

void BsOperator::apply(const CVec &in, CVec &out) const {
  out = in;
  const std::size_t np = grid_.points();
  for (int c = 0; c < 4; ++c)
    for (std::size_t i = 0; i < np; ++i)
      out[c * np + i] *= sqrt_v_[i];
  grid_.apply_free_resolvent(out, lambda_);
  for (int c = 0; c < 4; ++c)
    for (std::size_t i = 0; i < np; ++i)
      out[c * np + i] *= sqrt_v_[i];
}

void BsOperator::apply_square(const CVec &in, CVec &out) const {
  CVec tmp;
  apply(in, tmp);
  apply(tmp, out);
}

void BsOperator::apply_shifted_square(const CVec &in, CVec &out) const {
  CVec tmp;
  apply(in, tmp);
  for (std::size_t i = 0; i < in.size(); ++i)
    tmp[i] -= in[i];
  apply(tmp, out);
  for (std::size_t i = 0; i < in.size(); ++i)
    out[i] -= tmp[i];
}

LanczosEstimate lanczos_extremal(const SpinorGrid &grid,
                                 const std::function<void(const CVec &, CVec &)> &op,
                                 bool want_largest, std::uint64_t seed, int max_iterations,
                                 double target_residual) {
  if (max_iterations < 50)
    throw ValidationError("BadIterationBudget", "iteration budget must be at least 50");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  CVec v = grid.make_field();
  for (auto &z : v)
    z = std::complex<double>(gauss(rng), gauss(rng));

  const int basis_cap = 30;
  LanczosEstimate best;
  int applied = 0;

  while (applied < max_iterations) {
    // One Lanczos cycle with full reorthogonalization, started from v.
    std::vector<CVec> basis;
    std::vector<double> alpha, beta;
    {
      const double nv = grid.norm(v);
      if (!(nv > 0.0))
        throw SolverError("Stagnation", "Lanczos start vector vanished");
      for (auto &z : v)
        z /= nv;
    }
    basis.push_back(v);
    CVec w;
    for (int j = 0; j < basis_cap && applied < max_iterations; ++j) {
      op(basis[j], w);
      ++applied;
      const double a = std::real(grid.inner(basis[j], w));
      alpha.push_back(a);
      // w -= alpha_j v_j + beta_{j-1} v_{j-1}, then full reorthogonalization.
      for (std::size_t i = 0; i < w.size(); ++i)
        w[i] -= a * basis[j][i];
      if (j > 0)
        for (std::size_t i = 0; i < w.size(); ++i)
          w[i] -= beta[j - 1] * basis[j - 1][i];
      for (const auto &u : basis) {
        const auto proj = grid.inner(u, w);
        for (std::size_t i = 0; i < w.size(); ++i)
          w[i] -= proj * u[i];
      }
      const double b = grid.norm(w);
      if (b < 1e-14)
        break;
      beta.push_back(b);
      for (auto &z : w)
        z /= b;
      basis.push_back(w);
      if (static_cast<int>(basis.size()) > basis_cap)
        break;
    }

    const int m = static_cast<int>(alpha.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      T(i, i) = alpha[i];
      if (i + 1 < m && i < static_cast<int>(beta.size())) {
        T(i, i + 1) = beta[i];
        T(i + 1, i) = beta[i];
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const int pick = want_largest ? m - 1 : 0;
    const double ritz = es.eigenvalues()(pick);
    const Eigen::VectorXd y = es.eigenvectors().col(pick);

    CVec ritz_vec = grid.make_field();
    for (int j = 0; j < m; ++j)
      for (std::size_t i = 0; i < ritz_vec.size(); ++i)
        ritz_vec[i] += y(j) * basis[j][i];

    op(ritz_vec, w);
    ++applied;
    double rnorm = 0.0;
    {
      const double nv = grid.norm(ritz_vec);
      CVec r = w;
      for (std::size_t i = 0; i < r.size(); ++i)
        r[i] -= ritz * ritz_vec[i];
      rnorm = grid.norm(r) / nv;
    }
    best.value = ritz;
    best.residual = rnorm;
    best.iterations = applied;
    best.trace.push_back(ritz);
    best.vector = ritz_vec;
    if (rnorm <= target_residual)
      return best;
    v = ritz_vec; // restart from the best Ritz vector
  }
  throw SolverError("Stagnation", "Lanczos residual stalled above target within budget");
}

BsNormEstimate bs_norm_estimate(const BsOperator &op, std::uint64_t seed, int max_iterations,
                                double target_residual) {
  auto apply = [&op](const CVec &in, CVec &out) { op.apply_square(in, out); };
  const auto lz =
      lanczos_extremal(op.grid(), apply, true, seed, max_iterations, target_residual);
  BsNormEstimate est;
  est.estimate = std::sqrt(std::max(0.0, lz.value));
  est.residual = lz.residual;
  est.iterations = lz.iterations;
  est.trace = lz.trace;
  return est;
}

BsEigenCheck bs_eigen_check(const BsOperator &op, std::uint64_t seed, int max_iterations,
                            double target_residual) {
  auto apply = [&op](const CVec &in, CVec &out) { op.apply_shifted_square(in, out); };
  const auto lz =
      lanczos_extremal(op.grid(), apply, false, seed, max_iterations, target_residual);

  BsEigenCheck chk;
  chk.residual = lz.residual;
  chk.iterations = lz.iterations;

  CVec kv;
  op.apply(lz.vector, kv);
  const double nv2 = std::real(op.grid().inner(lz.vector, lz.vector));
  chk.eigenvalue_nearest_one = std::real(op.grid().inner(lz.vector, kv)) / nv2;
  chk.defect = std::abs(chk.eigenvalue_nearest_one - 1.0);

  const auto &grid = op.grid();
  const std::size_t np = grid.points();
  double mass = 0.0, r2 = 0.0;
  const int n = grid.n();
  std::size_t idx = 0;
  for (int iz = 0; iz < n; ++iz)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix, ++idx) {
        double dens = 0.0;
        for (int c = 0; c < 4; ++c)
          dens += std::norm(lz.vector[c * np + idx]);
        mass += dens;
        r2 += dens * grid.node(ix, iy, iz).squaredNorm();
      }
  chk.localization_radius = std::sqrt(r2 / mass);
  return chk;
}

} // namespace dgap
