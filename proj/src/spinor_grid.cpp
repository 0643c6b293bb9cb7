// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0

#include "dgap/spinor_grid.hpp"

#include <cmath>
#include <fftw3.h>
#include <mutex>
#include <numbers>

#include "dgap/errors.hpp"
#include "dgap/radial_channel.hpp"

namespace dgap {

namespace {
std::mutex fftw_mutex; // plan creation/destruction is not thread-safe
}

struct SpinorGrid::Plans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  CVec work;
};

SpinorGrid::SpinorGrid(int n, double box_half_length)
    : n_(n), box_(box_half_length), kPiOverL_(0.0) {
  if (n < 4 || (n & (n - 1)) != 0)
    throw ValidationError("BadGrid", "grid size must be a power of two >= 4");
  if (!(box_ > 0.0))
    throw ValidationError("BadGrid", "box half-length must be positive");
  kPiOverL_ = std::numbers::pi / box_;

  plans_ = new Plans;
  plans_->work.resize(field_size());
  auto *buf = reinterpret_cast<fftw_complex *>(plans_->work.data());
  const int dims[3] = {n_, n_, n_};
  std::lock_guard<std::mutex> lock(fftw_mutex);
  plans_->fwd = fftw_plan_many_dft(3, dims, 4, buf, nullptr, 1, static_cast<int>(points()), buf,
                                   nullptr, 1, static_cast<int>(points()), FFTW_FORWARD,
                                   FFTW_ESTIMATE);
  plans_->bwd = fftw_plan_many_dft(3, dims, 4, buf, nullptr, 1, static_cast<int>(points()), buf,
                                   nullptr, 1, static_cast<int>(points()), FFTW_BACKWARD,
                                   FFTW_ESTIMATE);
}

SpinorGrid::~SpinorGrid() {
  std::lock_guard<std::mutex> lock(fftw_mutex);
  fftw_destroy_plan(plans_->fwd);
  fftw_destroy_plan(plans_->bwd);
  delete plans_;
}

std::complex<double> SpinorGrid::inner(const CVec &a, const CVec &b) const {
  std::complex<double> s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += std::conj(a[i]) * b[i];
  return s * cell_volume();
}

double SpinorGrid::norm(const CVec &a) const { return std::sqrt(std::abs(inner(a, a))); }

void SpinorGrid::forward(CVec &field) const {
  plans_->work = field;
  fftw_execute(plans_->fwd);
  field = plans_->work;
}

void SpinorGrid::inverse(CVec &field) const {
  plans_->work = field;
  fftw_execute(plans_->bwd);
  const double scale = 1.0 / static_cast<double>(points());
  for (std::size_t i = 0; i < field.size(); ++i)
    field[i] = plans_->work[i] * scale;
}

namespace {

using Cx = std::complex<double>;

//! sigma . p acting on a 2-spinor (a, b).
inline void sigma_dot(double p1, double p2, double p3, Cx a, Cx b, Cx &oa, Cx &ob) {
  oa = p3 * a + Cx(p1, -p2) * b;
  ob = Cx(p1, p2) * a - p3 * b;
}

} // namespace

void SpinorGrid::apply_free_resolvent(CVec &field, double lambda) const {
  if (!(lambda > -1.0 + kGapGuard && lambda < 1.0 - kGapGuard))
    throw SolverError("LambdaOutOfGap", "resolvent shift outside the guarded gap");
  forward(field);
  const std::size_t np = points();
  for (int iz = 0; iz < n_; ++iz) {
    const double p3 = momentum(iz);
    for (int iy = 0; iy < n_; ++iy) {
      const double p2 = momentum(iy);
      for (int ix = 0; ix < n_; ++ix) {
        const double p1 = momentum(ix);
        const std::size_t idx =
            static_cast<std::size_t>(iz) * n_ * n_ + static_cast<std::size_t>(iy) * n_ + ix;
        const double denom = p1 * p1 + p2 * p2 + p3 * p3 + 1.0 - lambda * lambda;
        const Cx u1 = field[idx], u2 = field[np + idx];
        const Cx l1 = field[2 * np + idx], l2 = field[3 * np + idx];
        Cx su1, su2, sl1, sl2;
        sigma_dot(p1, p2, p3, l1, l2, su1, su2); // alpha.p upper = sigma.p lower
        sigma_dot(p1, p2, p3, u1, u2, sl1, sl2);
        field[idx] = (su1 + (1.0 + lambda) * u1) / denom;
        field[np + idx] = (su2 + (1.0 + lambda) * u2) / denom;
        field[2 * np + idx] = (sl1 + (lambda - 1.0) * l1) / denom;
        field[3 * np + idx] = (sl2 + (lambda - 1.0) * l2) / denom;
      }
    }
  }
  inverse(field);
}

void SpinorGrid::apply_dirac_minus_lambda(CVec &field, double lambda) const {
  forward(field);
  const std::size_t np = points();
  for (int iz = 0; iz < n_; ++iz) {
    const double p3 = momentum(iz);
    for (int iy = 0; iy < n_; ++iy) {
      const double p2 = momentum(iy);
      for (int ix = 0; ix < n_; ++ix) {
        const double p1 = momentum(ix);
        const std::size_t idx =
            static_cast<std::size_t>(iz) * n_ * n_ + static_cast<std::size_t>(iy) * n_ + ix;
        const Cx u1 = field[idx], u2 = field[np + idx];
        const Cx l1 = field[2 * np + idx], l2 = field[3 * np + idx];
        Cx su1, su2, sl1, sl2;
        sigma_dot(p1, p2, p3, l1, l2, su1, su2);
        sigma_dot(p1, p2, p3, u1, u2, sl1, sl2);
        field[idx] = su1 + (1.0 - lambda) * u1;
        field[np + idx] = su2 + (1.0 - lambda) * u2;
        field[2 * np + idx] = sl1 - (1.0 + lambda) * l1;
        field[3 * np + idx] = sl2 - (1.0 + lambda) * l2;
      }
    }
  }
  inverse(field);
}

void SpinorGrid::apply_abs_momentum(CVec &field) const {
  forward(field);
  const std::size_t np = points();
  for (int iz = 0; iz < n_; ++iz) {
    const double p3 = momentum(iz);
    for (int iy = 0; iy < n_; ++iy) {
      const double p2 = momentum(iy);
      for (int ix = 0; ix < n_; ++ix) {
        const double p1 = momentum(ix);
        const std::size_t idx =
            static_cast<std::size_t>(iz) * n_ * n_ + static_cast<std::size_t>(iy) * n_ + ix;
        const double p = std::sqrt(p1 * p1 + p2 * p2 + p3 * p3);
        for (int c = 0; c < 4; ++c)
          field[c * np + idx] *= p;
      }
    }
  }
  inverse(field);
}

std::vector<double> sampled_potential(const SpinorGrid &grid, const ChargeMeasure &measure,
                                      double cap) {
  if (!(cap > 0.0))
    throw ValidationError("BadGrid", "potential cap must be positive");
  measure.validate(MeasureRegime::solver);
  std::vector<double> v(grid.points());
  const int n = grid.n();
  std::size_t idx = 0;
  for (int iz = 0; iz < n; ++iz)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix, ++idx) {
        try {
          v[idx] = std::min(measure.potential(grid.node(ix, iy, iz)), cap);
        } catch (const SolverError &) {
          throw SolverError("QuadratureNodeOnCenter", "grid node coincides with an atom center");
        }
      }
  return v;
}

} // namespace dgap
