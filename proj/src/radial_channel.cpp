// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0

#include "dgap/radial_channel.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "dgap/errors.hpp"
#include "dgap/quadrature.hpp"

namespace dgap {

Eigen::VectorXd smallest_generalized_eigenvalues(const Eigen::MatrixXd &A,
                                                 const Eigen::MatrixXd &M, int k) {
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success)
    throw SolverError("NotPositiveDefinite", "mass matrix Cholesky failed");
  const Eigen::MatrixXd L = llt.matrixL();
  Eigen::MatrixXd C = L.triangularView<Eigen::Lower>().solve(A.transpose()).transpose();
  C = L.triangularView<Eigen::Lower>().solve(C);
  C = 0.5 * (C + C.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw SolverError("EigFailed", "symmetric eigensolver did not converge");
  const int kk = std::min<int>(k, C.rows());
  return es.eigenvalues().head(kk);
}

ChannelPencil::ChannelPencil(const ChargeMeasure &measure, int kappa,
                             const RadialBasisSpec &basis_spec,
                             std::optional<double> potential_cap, int quad_pts)
    : kappa_(kappa), basis_(basis_spec) {
  if (kappa == 0)
    throw ValidationError("InvalidBasisSpec", "spin-orbit number kappa must be nonzero");
  measure.validate(MeasureRegime::solver);
  if (!measure.is_radial())
    throw ValidationError("NotRadial", "channel reduction needs a radial measure");
  if (potential_cap) {
    // CappedRadialPotential must outlive node construction; copy its data in.
    CappedRadialPotential capped(measure, *potential_cap);
    const auto breaks = capped.breakpoints();
    ChargeMeasure copy = measure;
    const double cap = *potential_cap;
    build_nodes(
        [copy, cap](double r) {
          if (r <= 0.0)
            return cap;
          return std::min(copy.potential_radial(r), cap);
        },
        breaks, quad_pts);
  } else {
    ChargeMeasure copy = measure;
    build_nodes([copy](double r) { return copy.potential_radial(r); },
                measure.radial_breakpoints(), quad_pts);
  }
  assemble_static();
}

ChannelPencil::ChannelPencil(std::function<double(double)> potential,
                             std::vector<double> breakpoints, int kappa,
                             const RadialBasisSpec &basis_spec, int quad_pts)
    : kappa_(kappa), basis_(basis_spec) {
  if (kappa == 0)
    throw ValidationError("InvalidBasisSpec", "spin-orbit number kappa must be nonzero");
  build_nodes(potential, breakpoints, quad_pts);
  assemble_static();
}

void ChannelPencil::build_nodes(const std::function<double(double)> &potential,
                                const std::vector<double> &pot_breaks, int quad_pts) {
  const int pts = quad_pts > 0 ? quad_pts : basis_.order() + 2;
  const QuadRule &rule = gauss_legendre(pts);
  const auto &bp = basis_.breakpoints();

  nodes_.clear();
  for (int iv = 0; iv < basis_.n_intervals(); ++iv) {
    // Split the mesh interval at any potential breakpoints falling inside.
    std::vector<double> edges = {bp[iv], bp[iv + 1]};
    for (double t : pot_breaks)
      if (t > bp[iv] && t < bp[iv + 1])
        edges.push_back(t);
    std::sort(edges.begin(), edges.end());
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
      const double h = 0.5 * (edges[e + 1] - edges[e]);
      const double c = 0.5 * (edges[e + 1] + edges[e]);
      for (int q = 0; q < pts; ++q) {
        Node node;
        node.r = c + h * rule.x[q];
        node.w = h * rule.w[q];
        node.V = potential(node.r);
        const auto loc = basis_.eval_local(iv, node.r);
        node.first_full = loc.first_full;
        node.count = loc.count;
        for (int k = 0; k < loc.count; ++k) {
          node.b[k] = loc.value[k];
          node.u[k] = loc.deriv[k] + kappa_ * loc.value[k] / node.r;
        }
        nodes_.push_back(node);
      }
    }
  }
}

void ChannelPencil::assemble_static() {
  const int n = dim();
  mass_ = Eigen::MatrixXd::Zero(n, n);
  pot_ = Eigen::MatrixXd::Zero(n, n);
  for (const auto &node : nodes_) {
    for (int a = 0; a < node.count; ++a) {
      const int i = basis_.kept_index(node.first_full + a);
      if (i < 0)
        continue;
      for (int bcol = a; bcol < node.count; ++bcol) {
        const int j = basis_.kept_index(node.first_full + bcol);
        if (j < 0)
          continue;
        const double mv = node.w * node.b[a] * node.b[bcol];
        mass_(i, j) += mv;
        pot_(i, j) += mv * node.V;
      }
    }
  }
  mass_ = mass_.selfadjointView<Eigen::Upper>();
  pot_ = pot_.selfadjointView<Eigen::Upper>();
  mass_llt_.compute(mass_);
  if (mass_llt_.info() != Eigen::Success)
    throw SolverError("NotPositiveDefinite", "channel mass matrix Cholesky failed");
}

Eigen::MatrixXd ChannelPencil::matrix_at(double lambda) const {
  if (!(lambda >= -1.0 + kGapGuard && lambda <= 1.0 - kGapGuard))
    throw SolverError("LambdaOutOfGap", "lambda outside the guarded gap");
  const int n = dim();
  Eigen::MatrixXd A = (1.0 - lambda) * mass_ - pot_;
  for (const auto &node : nodes_) {
    const double wgt = node.w / (1.0 + lambda + node.V);
    for (int a = 0; a < node.count; ++a) {
      const int i = basis_.kept_index(node.first_full + a);
      if (i < 0)
        continue;
      for (int bcol = a; bcol < node.count; ++bcol) {
        const int j = basis_.kept_index(node.first_full + bcol);
        if (j < 0)
          continue;
        const double sv = wgt * node.u[a] * node.u[bcol];
        A(i, j) += sv;
        if (i != j)
          A(j, i) += sv;
      }
    }
  }
  (void)n;
  return A;
}

Eigen::VectorXd ChannelPencil::smallest_levels(double lambda, int k) const {
  const Eigen::MatrixXd A = matrix_at(lambda);
  const Eigen::MatrixXd L = mass_llt_.matrixL();
  Eigen::MatrixXd C = L.triangularView<Eigen::Lower>().solve(A.transpose()).transpose();
  C = L.triangularView<Eigen::Lower>().solve(C);
  C = 0.5 * (C + C.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw SolverError("EigFailed", "symmetric eigensolver did not converge");
  return es.eigenvalues().head(std::min<int>(k, dim()));
}

} // namespace dgap
