// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0

#include "dgap/multicenter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "dgap/errors.hpp"
#include "dgap/radial_channel.hpp"

namespace dgap {

namespace {

constexpr double kPi = std::numbers::pi;

[[noreturn]] void bad_molecule(const std::string &what) {
  throw ValidationError("BadMolecule", what);
}

// 1D Obara-Saika table S(m, n) for monomial powers up to max_m, max_n about
// the Gaussian product center; S(0,0) carries sqrt(pi/p).
void overlap_table_1d(double p, double xpa, double xpb, int max_m, int max_n,
                      double table[4][4]) {
  const double half = 0.5 / p;
  table[0][0] = std::sqrt(kPi / p);
  for (int m = 0; m < max_m; ++m)
    table[m + 1][0] = xpa * table[m][0] + (m > 0 ? half * m * table[m - 1][0] : 0.0);
  for (int n = 0; n < max_n; ++n)
    for (int m = 0; m <= max_m; ++m)
      table[m][n + 1] = xpb * table[m][n] + half * ((m > 0 ? m * table[m - 1][n] : 0.0) +
                                                    (n > 0 ? n * table[m][n - 1] : 0.0));
}

} // namespace

void MoleculeSpec::validate() const {
  if (centers.empty())
    bad_molecule("at least one center required");
  if (centers.size() != weights.size())
    bad_molecule("centers and weights differ in length");
  for (double w : weights)
    if (!(w > 0.0 && w < 1.0))
      bad_molecule("every weight must lie in (0, 1)");
  for (std::size_t i = 0; i < centers.size(); ++i)
    for (std::size_t j = i + 1; j < centers.size(); ++j)
      if ((centers[i] - centers[j]).norm() < 1e-12)
        bad_molecule("centers must be pairwise distinct");
}

double MoleculeSpec::d_min() const {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < centers.size(); ++i)
    for (std::size_t j = i + 1; j < centers.size(); ++j)
      d = std::min(d, (centers[i] - centers[j]).norm());
  return d;
}

double MoleculeSpec::total_weight() const {
  double s = 0.0;
  for (double w : weights)
    s += w;
  return s;
}

double MoleculeSpec::max_weight() const {
  double m = 0.0;
  for (double w : weights)
    m = std::max(m, w);
  return m;
}

ChargeMeasure MoleculeSpec::measure() const {
  ChargeMeasure mu;
  for (std::size_t i = 0; i < centers.size(); ++i)
    mu.add(PointCharge{centers[i], weights[i]});
  return mu;
}

double MoleculeSpec::nuclear_repulsion() const {
  double u = 0.0;
  for (std::size_t i = 0; i < centers.size(); ++i)
    for (std::size_t j = i + 1; j < centers.size(); ++j)
      u += weights[i] * weights[j] / (centers[i] - centers[j]).norm();
  return u;
}

MoleculeSpec MoleculeSpec::scaled(double factor) const {
  MoleculeSpec out = *this;
  for (auto &c : out.centers)
    c *= factor;
  return out;
}

MoleculeSpec MoleculeSpec::translated(const Vec3 &shift) const {
  MoleculeSpec out = *this;
  for (auto &c : out.centers)
    c += shift;
  return out;
}

double scalar_overlap(const ScalarGaussian &a, const ScalarGaussian &b) {
  const double p = a.alpha + b.alpha;
  const Vec3 ab = a.center - b.center;
  const double pref = std::exp(-a.alpha * b.alpha / p * ab.squaredNorm());
  const Vec3 pc = (a.alpha * a.center + b.alpha * b.center) / p;
  const Vec3 pa = pc - a.center;
  const Vec3 pb = pc - b.center;
  double table[3][4][4];
  for (int ax = 0; ax < 3; ++ax)
    overlap_table_1d(p, pa[ax], pb[ax], 3, 3, table[ax]);
  double acc = 0.0;
  for (const auto &ma : a.poly)
    for (const auto &mb : b.poly) {
      double term = ma.c * mb.c;
      for (int ax = 0; ax < 3; ++ax)
        term *= table[ax][ma.p[ax]][mb.p[ax]];
      acc += term;
    }
  return pref * acc;
}

MolecularBasis MolecularBasis::build(const MoleculeSpec &spec, const MolecularBasisSpec &bspec) {
  spec.validate();
  if (bspec.J < 4)
    throw ValidationError("BadBasis", "even-tempered ladder needs J >= 4");
  if (!(bspec.beta > 1.0))
    throw ValidationError("BadBasis", "even-tempered ratio must exceed 1");
  if (!(bspec.alpha0 > 0.0))
    throw ValidationError("BadBasis", "smallest exponent must be positive");
  if (bspec.l_max < 0 || bspec.l_max > 2)
    throw ValidationError("BadBasis", "angular shells implemented for l_max in {0, 1, 2}");

  // Real solid harmonics as monomial lists, shells l = 0, 1, 2.
  static const std::vector<std::vector<Monomial>> shells[3] = {
      {{{{0, 0, 0}, 1.0}}},
      {{{{1, 0, 0}, 1.0}}, {{{0, 1, 0}, 1.0}}, {{{0, 0, 1}, 1.0}}},
      {{{{1, 1, 0}, 1.0}},
       {{{0, 1, 1}, 1.0}},
       {{{1, 0, 1}, 1.0}},
       {{{2, 0, 0}, 1.0}, {{0, 2, 0}, -1.0}},
       {{{0, 0, 2}, 2.0}, {{2, 0, 0}, -1.0}, {{0, 2, 0}, -1.0}}},
  };

  MolecularBasis basis;
  for (std::size_t m = 0; m < spec.centers.size(); ++m) {
    for (int j = bspec.J; j >= 0; --j) {
      const double alpha = bspec.alpha0 * std::pow(bspec.beta, j);
      for (int l = 0; l <= bspec.l_max; ++l) {
        for (const auto &poly : shells[l]) {
          ScalarGaussian f;
          f.center = spec.centers[m];
          f.alpha = alpha;
          f.poly = poly;
          f.center_index = m;
          const double n2 = scalar_overlap(f, f);
          for (auto &mono : f.poly)
            mono.c /= std::sqrt(n2);
          basis.fns_.push_back(std::move(f));
        }
      }
    }
  }

  const int dim = basis.raw_scalar_dim();
  Eigen::MatrixXd S(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j)
      S(i, j) = S(j, i) = scalar_overlap(basis.fns_[i], basis.fns_[j]);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  if (es.info() != Eigen::Success)
    throw SolverError("EigFailed", "overlap eigendecomposition failed");
  const Eigen::VectorXd ev = es.eigenvalues();
  const double top = ev(dim - 1);
  if (!(top > 0.0))
    throw SolverError("DegenerateBasis", "overlap matrix is not positive");
  int first = 0;
  while (first < dim && ev(first) <= 1e-8 * top)
    ++first;
  const int kept = dim - first;
  if (kept == 0)
    throw SolverError("DegenerateBasis", "canonical orthogonalization removed every function");
  basis.cond_ = top / ev(0);
  basis.x_.resize(dim, kept);
  for (int c = 0; c < kept; ++c)
    basis.x_.col(c) = es.eigenvectors().col(first + c) / std::sqrt(ev(first + c));

  // A center whose functions have no weight in the kept subspace is dead.
  for (std::size_t m = 0; m < spec.centers.size(); ++m) {
    double support = 0.0;
    for (int i = 0; i < dim; ++i)
      if (basis.fns_[i].center_index == m)
        support = std::max(support, basis.x_.row(i).lpNorm<Eigen::Infinity>());
    if (support < 1e-12)
      throw SolverError("DegenerateBasis", "pruning emptied a center");
  }
  return basis;
}

double MolecularBasis::min_alpha() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto &f : fns_)
    m = std::min(m, f.alpha);
  return m;
}

void MolecularBasis::eval_raw(const Vec3 &x, double *val, double *gx, double *gy,
                              double *gz) const {
  for (std::size_t i = 0; i < fns_.size(); ++i) {
    const auto &f = fns_[i];
    const Vec3 y = x - f.center;
    const double g = std::exp(-f.alpha * y.squaredNorm());
    double v = 0.0;
    Vec3 grad = Vec3::Zero();
    for (const auto &mono : f.poly) {
      double m = mono.c;
      for (int ax = 0; ax < 3; ++ax)
        for (int k = 0; k < mono.p[ax]; ++k)
          m *= y[ax];
      v += m;
      for (int ax = 0; ax < 3; ++ax) {
        if (mono.p[ax] > 0) {
          double dm = mono.c * mono.p[ax];
          for (int bx = 0; bx < 3; ++bx) {
            const int pw = mono.p[bx] - (bx == ax ? 1 : 0);
            for (int k = 0; k < pw; ++k)
              dm *= y[bx];
          }
          grad[ax] += dm;
        }
      }
    }
    grad -= 2.0 * f.alpha * v * y;
    val[i] = v * g;
    gx[i] = grad[0] * g;
    gy[i] = grad[1] * g;
    gz[i] = grad[2] * g;
  }
}

MolecularPencil::MolecularPencil(const MoleculeSpec &spec, const MolecularBasis &basis,
                                 MolecularGridSpec grid_spec)
    : spec_(spec) {
  spec_.validate();
  if (grid_spec.r_outer <= 0.0)
    grid_spec.r_outer = std::max(12.0, 6.5 / std::sqrt(basis.min_alpha()));
  nodes_ = molecular_grid(spec_.centers, grid_spec);
  const std::size_t n = nodes_.size();
  const ChargeMeasure mu = spec_.measure();

  w_.resize(static_cast<Eigen::Index>(n));
  v_.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto &c : spec_.centers)
      if ((nodes_[i].x - c).norm() < 1e-13 * (1.0 + c.norm()))
        throw SolverError("QuadratureNodeOnCenter", "a quadrature node hit a nucleus");
    w_(static_cast<Eigen::Index>(i)) = nodes_[i].w;
    v_(static_cast<Eigen::Index>(i)) = mu.potential(nodes_[i].x);
  }

  const int raw = basis.raw_scalar_dim();
  kept_ = basis.kept_scalar_dim();
  Eigen::MatrixXd rv(n, raw), rx(n, raw), ry(n, raw), rz(n, raw);
  std::vector<double> bv(raw), bx(raw), by(raw), bz(raw);
  for (std::size_t i = 0; i < n; ++i) {
    basis.eval_raw(nodes_[i].x, bv.data(), bx.data(), by.data(), bz.data());
    for (int j = 0; j < raw; ++j) {
      rv(static_cast<Eigen::Index>(i), j) = bv[static_cast<std::size_t>(j)];
      rx(static_cast<Eigen::Index>(i), j) = bx[static_cast<std::size_t>(j)];
      ry(static_cast<Eigen::Index>(i), j) = by[static_cast<std::size_t>(j)];
      rz(static_cast<Eigen::Index>(i), j) = bz[static_cast<std::size_t>(j)];
    }
  }
  const Eigen::MatrixXd &x = basis.orthogonalizer();
  f_ = rv * x;
  g_[0] = rx * x;
  g_[1] = ry * x;
  g_[2] = rz * x;
}

double MolecularPencil::max_kinetic_weight(double lambda) const {
  return 1.0 / (1.0 + lambda + v_.minCoeff());
}

Eigen::MatrixXcd MolecularPencil::matrix_at(double lambda) const {
  if (!(lambda >= -1.0 + kGapGuard && lambda <= 1.0 - kGapGuard))
    throw SolverError("LambdaOutOfGap", "lambda outside the guarded gap");
  const Eigen::ArrayXd dk = w_.array() / (1.0 + lambda + v_.array());
  const Eigen::ArrayXd dv = w_.array() * (1.0 - lambda - v_.array());

  Eigen::MatrixXd pab[3][3];
  for (int b = 0; b < 3; ++b) {
    const Eigen::MatrixXd scaled = dk.matrix().asDiagonal() * g_[b];
    for (int a = 0; a <= b; ++a)
      pab[a][b] = g_[a].transpose() * scaled;
  }
  Eigen::MatrixXd p = pab[0][0] + pab[1][1] + pab[2][2];
  p = 0.5 * (p + p.transpose()).eval();
  Eigen::MatrixXd q = f_.transpose() * (dv.matrix().asDiagonal() * f_);
  q = 0.5 * (q + q.transpose()).eval();
  const Eigen::MatrixXd c3 = pab[0][1] - pab[0][1].transpose();
  const Eigen::MatrixXd c1 = pab[1][2] - pab[1][2].transpose();
  const Eigen::MatrixXd c2 = pab[0][2].transpose() - pab[0][2];

  const std::complex<double> im(0.0, 1.0);
  Eigen::MatrixXcd a(2 * kept_, 2 * kept_);
  a.topLeftCorner(kept_, kept_) = (p + q).cast<std::complex<double>>() + im * c3;
  a.bottomRightCorner(kept_, kept_) = (p + q).cast<std::complex<double>>() - im * c3;
  a.topRightCorner(kept_, kept_) = im * c1 + c2.cast<std::complex<double>>();
  a.bottomLeftCorner(kept_, kept_) = im * c1 - c2.cast<std::complex<double>>();
  return a;
}

std::vector<double> MolecularPencil::smallest_levels(double lambda, int k) const {
  const Eigen::MatrixXcd a = matrix_at(lambda);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw SolverError("EigFailed", "molecular pencil eigensolve failed");
  std::vector<double> out(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i)
    out[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
  return out;
}

MinMaxLevel find_molecular_level(const MolecularPencil &pencil, int k, double tol) {
  if (k < 1 || k > pencil.dimension())
    throw ValidationError("BadLevelIndex", "level index outside the basis dimension");
  auto mk = [&](double lambda) { return pencil.smallest_levels(lambda, k).back(); };
  const RootResult root = find_decreasing_root(mk, tol);
  MinMaxLevel lvl;
  lvl.lambda = root.lambda;
  lvl.residual = root.residual;
  lvl.bracket_width = root.bracket_width;
  lvl.kappa = 0;
  lvl.within_channel = k;
  lvl.degeneracy = 1;
  lvl.evaluations = root.evaluations;
  lvl.basis_dim = pencil.dimension();
  return lvl;
}

std::vector<PesRecord> pes_sweep(const MoleculeSpec &unit_template,
                                 const std::vector<double> &separations,
                                 const PesOptions &opts) {
  unit_template.validate();
  for (double d : separations)
    if (!(d > 0.0))
      throw ValidationError("BadSeparationList", "separations must be positive");

  std::vector<PesRecord> records;
  records.reserve(separations.size());
  for (double d : separations) {
    PesRecord rec;
    rec.d = d;
    const MoleculeSpec mol = unit_template.scaled(d);
    rec.u_nuc = mol.nuclear_repulsion();
    try {
      const MolecularBasis basis = MolecularBasis::build(mol, opts.basis);
      const MolecularPencil pencil(mol, basis, opts.grid);
      const MinMaxLevel lvl = find_molecular_level(pencil, 1, opts.tol);
      rec.lambda1 = lvl.lambda;
      rec.residual = lvl.residual;
      rec.basis_dim = lvl.basis_dim;
      rec.total = rec.lambda1 + rec.u_nuc;
      rec.status = "ok";
    } catch (const Error &e) {
      rec.status = e.name();
    }
    records.push_back(std::move(rec));
  }
  return records;
}

namespace {

// Quintic smoothstep and its derivative on [0, 1].
double smoothstep(double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }
double smoothstep_d(double t) { return 30.0 * t * t * (1.0 - t) * (1.0 - t); }

} // namespace

CompactPartition::CompactPartition(const MoleculeSpec &spec) {
  spec.validate();
  centers_ = spec.centers;
  const std::size_t m = centers_.size();
  if (m == 1) {
    centers_.clear(); // complement element alone; no bumps, zero gradient
    return;
  }
  radii_.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    double dk = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j)
      if (j != k)
        dk = std::min(dk, (centers_[k] - centers_[j]).norm());
    radii_[k] = {dk / 4.0, dk / 2.0};
  }

  // Measured sup norms: bump slope plus the complement slope, sampled densely
  // across each transition shell (supports are disjoint).
  double comp_sup = 0.0;
  double bump_sum = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double width = radii_[k][1] - radii_[k][0];
    double bump_sup = 0.0;
    for (int i = 1; i < 4000; ++i) {
      const double t = i / 4000.0;
      const double h = 1.0 - smoothstep(t);
      const double hp = smoothstep_d(t) / width;
      bump_sup = std::max(bump_sup, hp);
      const double denom = std::sqrt(std::max(1.0 - h * h, 1e-300));
      comp_sup = std::max(comp_sup, h * hp / denom);
    }
    bump_sum += bump_sup * bump_sup;
  }
  grad_sup_sq_sum_ = bump_sum + comp_sup * comp_sup;
}

void CompactPartition::eval(const Vec3 &x, std::vector<double> &j,
                            std::vector<Vec3> &grad) const {
  const std::size_t m = centers_.size();
  j.assign(m + 1, 0.0);
  grad.assign(m + 1, Vec3::Zero());
  double sum2 = 0.0;
  Vec3 sum_jg = Vec3::Zero();
  for (std::size_t k = 0; k < m; ++k) {
    const Vec3 y = x - centers_[k];
    const double r = y.norm();
    if (r >= radii_[k][1])
      continue;
    if (r <= radii_[k][0]) {
      j[k] = 1.0;
    } else {
      const double width = radii_[k][1] - radii_[k][0];
      const double t = (r - radii_[k][0]) / width;
      j[k] = 1.0 - smoothstep(t);
      const double hp = -smoothstep_d(t) / width;
      grad[k] = (r > 0.0) ? Vec3(hp * y / r) : Vec3::Zero();
    }
    sum2 += j[k] * j[k];
    sum_jg += j[k] * grad[k];
  }
  const double comp2 = std::max(0.0, 1.0 - sum2);
  const double comp = std::sqrt(comp2);
  j[m] = comp;
  grad[m] = (comp > 1e-150) ? Vec3(-sum_jg / comp) : Vec3::Zero();
}

namespace {

TrialSpinor molecular_trial(const MoleculeSpec &spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed * 0x2545f4914f6cdd1dULL + 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  const int n = 3 + static_cast<int>(rng() % 4u);
  std::vector<GaussianPrimitive> prims;
  for (int i = 0; i < n; ++i) {
    GaussianPrimitive g;
    const Vec3 anchor = spec.centers[rng() % spec.centers.size()];
    g.center = anchor + 2.0 * std::cbrt(unit(rng)) *
                            Vec3(sym(rng), sym(rng), sym(rng)).normalized();
    g.alpha = 0.25 * std::pow(16.0, unit(rng));
    g.poly = (unit(rng) < 0.6) ? -1 : static_cast<int>(rng() % 3u);
    g.spinor = rng() & 1;
    g.coeff = sym(rng);
    if (std::abs(g.coeff) < 0.05) g.coeff = 0.3;
    prims.push_back(g);
  }
  return TrialSpinor(std::move(prims));
}

} // namespace

LocalizationCheck localization_margins(const MoleculeSpec &spec, double lambda, int n_trials,
                                       std::uint64_t seed, const MolecularGridSpec &grid_spec) {
  spec.validate();
  if (!(lambda >= -1.0 + kGapGuard && lambda <= 1.0 - kGapGuard))
    throw SolverError("LambdaOutOfGap", "lambda outside the guarded gap");
  if (n_trials < 1)
    throw ValidationError("BadParameter", "at least one trial required");

  std::vector<TrialSpinor> trials;
  trials.reserve(static_cast<std::size_t>(n_trials));
  for (int i = 0; i < n_trials; ++i)
    trials.push_back(molecular_trial(spec, seed + static_cast<std::uint64_t>(i)));

  LocalizationCheck out;
  out.lambda = lambda;
  out.nu_bar = spec.max_weight();
  const std::size_t m = spec.size();
  out.d = (m > 1) ? spec.d_min() : 0.0;

  const CompactPartition partition(spec);
  out.kappa_measured = (m > 1) ? out.d * out.d * partition.grad_sup_sq_sum() : 0.0;

  MolecularGridSpec gs = grid_spec;
  if (gs.r_outer <= 0.0) {
    double extent = 0.0;
    double amin = std::numeric_limits<double>::infinity();
    for (const auto &t : trials) {
      extent = std::max(extent, t.max_center_radius());
      amin = std::min(amin, t.min_alpha());
    }
    gs.r_outer = std::max(12.0, extent + 8.0 / std::sqrt(amin));
  }
  const auto nodes = molecular_grid(spec.centers, gs);
  const ChargeMeasure mu = spec.measure();
  std::vector<double> pot(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i)
    pot[i] = mu.potential(nodes[i].x);

  const double coef =
      2.0 * lambda + ((m > 1) ? 2.0 * (static_cast<double>(m) - 1.0) * out.nu_bar / out.d +
                                    out.kappa_measured / (out.d * out.d * (1.0 + lambda))
                              : 0.0);
  const double nu2 = 1.0 - out.nu_bar * out.nu_bar;

  for (const auto &trial : trials) {
    double q = 0.0, kin2 = 0.0, nrm = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto v = trial.eval(nodes[i].x);
      const double kin = TrialSpinor::sigma_grad_sq(v);
      const double dens = TrialSpinor::density(v);
      const double w = nodes[i].w;
      q += w * (kin / (1.0 + lambda + pot[i]) + (1.0 - lambda - pot[i]) * dens);
      kin2 += w * kin / (2.0 + pot[i]);
      nrm += w * dens;
    }
    out.margins.push_back(q - nu2 * kin2 + coef * nrm);
  }
  return out;
}

} // namespace dgap
