// Copyright 2026 The spinlab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file locality.hpp
 * @brief Heisenberg-picture dynamics on small systems, commutator profiles
 *        C_B(x,t) against the Lieb-Robinson bound, and ground-state
 *        clustering measurements.
 */

#pragma once

#include "spinlab/linalg.hpp"
#include "spinlab/spectra.hpp"
#include "spinlab/spinops.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

namespace spinlab {

/// H = U diag(E) U^dagger, computed once and shared by every evolution.
class SpectralDecomposition {
 public:
  explicit SpectralDecomposition(const SparseHermitian& h, Index dense_cap = 4096) : basis_(h.basis()) {
    if (h.dim() > dense_cap)
      throw CapExceeded("dimension " + std::to_string(h.dim()) + " exceeds dense cap " + std::to_string(dense_cap));
    const HermitianEigen es = hermitian_eigen(h.dense());
    energies_ = es.values;
    vectors_ = es.vectors;
  }

  [[nodiscard]] Index dim() const { return energies_.size(); }
  [[nodiscard]] const RVec& energies() const { return energies_; }
  [[nodiscard]] const CMat& vectors() const { return vectors_; }
  [[nodiscard]] const TensorBasis& basis() const { return basis_; }

  /// alpha_t(A) = e^{itH} A e^{-itH}.
  [[nodiscard]] CMat evolve(const CMat& a, double t) const {
    if (a.rows() != dim() || a.cols() != dim()) throw InputError("operator dimension mismatch");
    CMat m = vectors_.adjoint() * a * vectors_;
    for (Index j = 0; j < dim(); ++j)
      for (Index i = 0; i < dim(); ++i) m(i, j) *= std::exp(kI * (t * (energies_(i) - energies_(j))));
    return vectors_ * m * vectors_.adjoint();
  }

 private:
  TensorBasis basis_;
  RVec energies_;
  CMat vectors_;
};

inline CMat heisenberg_evolve(const SparseHermitian& h, const CMat& a, double t) {
  return SpectralDecomposition(h).evolve(a, t);
}

/// Applies a single-site operator to every column of `v`.
inline CMat apply_site(const TensorBasis& basis, int site, const CMat& op, const CMat& v) {
  Index left = 1, right = 1;
  for (int x = 0; x < site; ++x) left *= basis.dims()[x];
  for (int x = site + 1; x < basis.sites(); ++x) right *= basis.dims()[x];
  return apply_middle(op, left, basis.dims()[site], right, v);
}

/// Orthonormal (Hilbert-Schmidt) basis of traceless Hermitian d x d matrices.
inline std::vector<CMat> traceless_hermitian_basis(Index d) {
  std::vector<CMat> out;
  for (Index j = 0; j < d; ++j)
    for (Index k = j + 1; k < d; ++k) {
      CMat s = CMat::Zero(d, d), a = CMat::Zero(d, d);
      s(j, k) = s(k, j) = 1.0 / std::sqrt(2.0);
      a(j, k) = -kI / std::sqrt(2.0);
      a(k, j) = kI / std::sqrt(2.0);
      out.push_back(s);
      out.push_back(a);
    }
  for (Index l = 1; l < d; ++l) {
    CMat z = CMat::Zero(d, d);
    const double norm = 1.0 / std::sqrt(static_cast<double>(l * (l + 1)));
    for (Index i = 0; i < l; ++i) z(i, i) = norm;
    z(l, l) = -static_cast<double>(l) * norm;
    out.push_back(z);
  }
  return out;
}

namespace detail {

/// Lanczos estimate of ||K|| from below (largest Ritz value of K^dagger K).
inline double norm_estimate(const CMat& k, int steps = 24) {
  const Index n = k.cols();
  if (n == 0) return 0.0;
  steps = static_cast<int>(std::min<Index>(steps, n));
  std::vector<CVec> q;
  CVec v(n);
  for (Index i = 0; i < n; ++i) v(i) = cplx(1.0 + 0.37 * std::sin(1.3 * static_cast<double>(i)), 0.11 * std::cos(0.7 * static_cast<double>(i)));
  v.normalize();
  std::vector<double> alpha, beta;
  for (int j = 0; j < steps; ++j) {
    q.push_back(v);
    CVec w = k.adjoint() * (k * v);
    alpha.push_back(v.dot(w).real());
    for (const auto& u : q) w -= u * u.dot(w);
    for (const auto& u : q) w -= u * u.dot(w);
    const double b = w.norm();
    if (b < 1e-13) break;
    beta.push_back(b);
    v = w / b;
  }
  const Index m = static_cast<Index>(alpha.size());
  RMat t = RMat::Zero(m, m);
  for (Index i = 0; i < m; ++i) {
    t(i, i) = alpha[static_cast<std::size_t>(i)];
    if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
  }
  Eigen::SelfAdjointEigenSolver<RMat> es(t, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues()(m - 1)));
}

/// Deterministic directions on the unit sphere of R^n.
inline std::vector<RVec> sphere_grid(Index n, int points, std::uint64_t seed) {
  std::vector<RVec> out;
  for (Index i = 0; i < n; ++i) {
    RVec e = RVec::Zero(n);
    e(i) = 1.0;
    out.push_back(e);
  }
  if (n == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < points; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / points;
      const double r = std::sqrt(1.0 - z * z);
      RVec p(3);
      p << r * std::cos(golden * i), r * std::sin(golden * i), z;
      out.push_back(p);
    }
  } else {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    for (int i = 0; i < points; ++i) {
      RVec p(n);
      for (Index k = 0; k < n; ++k) p(k) = g(rng);
      out.push_back(p.normalized());
    }
  }
  return out;
}

}  // namespace detail

struct SupOptions {
  int grid_points = 64;      // coarse directions on the unit sphere of coefficient space
  double initial_step = 0.25;
  double final_step = 1e-3;  // pattern search stops below this step
  std::uint64_t seed = 0;
};

struct CommutatorProfile {
  std::vector<int> sites;
  std::vector<double> times;
  std::vector<std::vector<double>> values;  // values[i][k] = C_B(sites[i], times[k])
  int grid_points = 0;
  double final_step = 0.0;
};

/**
 * C_B(x,t) = sup_A ||[alpha_t(A), B]|| / ||A|| over traceless Hermitian A at
 * site x, using ||[alpha_t(A), B]|| = ||[A, alpha_{-t}(B)]||. The supremum is
 * approached from below by a sphere grid followed by a pattern search.
 */
inline CommutatorProfile commutator_profile(const SpectralDecomposition& sd, const CMat& b,
                                            const std::vector<int>& sites, const std::vector<double>& times,
                                            const SupOptions& opt = {}) {
  CommutatorProfile prof;
  prof.sites = sites;
  prof.times = times;
  prof.grid_points = opt.grid_points;
  prof.final_step = opt.final_step;
  prof.values.assign(sites.size(), std::vector<double>(times.size(), 0.0));
  const TensorBasis& basis = sd.basis();
  for (int x : sites)
    if (x < 0 || x >= basis.sites()) throw InputError("profile site outside the system");
  for (std::size_t k = 0; k < times.size(); ++k) {
    const CMat bt = sd.evolve(b, -times[k]);
    for (std::size_t i = 0; i < sites.size(); ++i) {
      const int x = sites[i];
      const std::vector<CMat> local = traceless_hermitian_basis(basis.dims()[x]);
      std::vector<CMat> comm;
      const CMat bt_adj = bt.adjoint();
      for (const auto& t : local)  // B A = (A B^*)^* for Hermitian A
        comm.push_back(apply_site(basis, x, t, bt) - apply_site(basis, x, t, bt_adj).adjoint());
      const Index n = static_cast<Index>(local.size());
      auto combine = [&](const std::vector<CMat>& ops, const RVec& c) {
        CMat s = CMat::Zero(ops[0].rows(), ops[0].cols());
        for (Index a = 0; a < n; ++a) s += c(a) * ops[static_cast<std::size_t>(a)];
        return s;
      };
      auto objective = [&](const RVec& c, bool exact) {
        const double an = operator_norm(combine(local, c));
        const CMat kc = combine(comm, c);
        return (exact ? operator_norm(kc) : detail::norm_estimate(kc)) / an;
      };
      RVec best;
      double fbest = -1.0;
      for (const RVec& c : detail::sphere_grid(n, opt.grid_points, opt.seed)) {
        const double f = objective(c, false);
        if (f > fbest) {
          fbest = f;
          best = c;
        }
      }
      for (double step = opt.initial_step; step >= opt.final_step;) {
        bool improved = false;
        for (Index a = 0; a < n && !improved; ++a)
          for (double sgn : {1.0, -1.0}) {
            RVec c = best;
            c(a) += sgn * step;
            c.normalize();
            const double f = objective(c, false);
            if (f > fbest * (1.0 + 1e-12)) {
              fbest = f;
              best = c;
              improved = true;
              break;
            }
          }
        if (!improved) step *= 0.5;
      }
      prof.values[i][k] = objective(best, true);
    }
  }
  return prof;
}

struct LrBoundValue {
  double sum_form = 0.0;
  std::optional<double> corollary;  // only for x outside Y
  double trivial = 0.0;             // 2 ||A|| ||B|| with ||A|| = 1
  double value = 0.0;               // the smallest of the three
};

/**
 * Right side of the Lieb-Robinson bound for C_B(x,t). `seeds` holds C_B(y,0)
 * per site; when empty the seeds 2 ||B|| chi_Y(y) are used.
 */
inline LrBoundValue lr_bound(const SpinGraph& graph, double phi_norm, double lambda, const std::vector<int>& support_y,
                             double b_norm, int x, double t, const std::vector<double>& seeds = {}) {
  if (!(lambda > 0.0)) throw InputError("lambda must be positive");
  if (!(phi_norm >= 0.0) || !std::isfinite(phi_norm)) throw InputError("interaction norm must be finite");
  if (support_y.empty()) throw InputError("B needs a nonempty support");
  const int n = graph.size();
  std::vector<double> c0(static_cast<std::size_t>(n), 0.0);
  if (seeds.empty()) {
    for (int y : support_y) c0.at(static_cast<std::size_t>(y)) = 2.0 * b_norm;
  } else {
    if (static_cast<int>(seeds.size()) != n) throw InputError("one seed per site required");
    c0 = seeds;
  }
  const double growth = std::exp(2.0 * std::abs(t) * phi_norm);
  LrBoundValue r;
  // zero seeds are skipped so an overflowing growth factor cannot produce inf * 0
  if (c0[static_cast<std::size_t>(x)] != 0.0) r.sum_form = growth * c0[static_cast<std::size_t>(x)];
  for (int y = 0; y < n; ++y)
    if (y != x && c0[static_cast<std::size_t>(y)] != 0.0) r.sum_form += std::exp(-lambda * graph.distance(x, y)) * (growth - 1.0) * c0[static_cast<std::size_t>(y)];
  r.trivial = 2.0 * b_norm;
  r.value = std::min(r.sum_form, r.trivial);
  if (std::find(support_y.begin(), support_y.end(), x) == support_y.end()) {
    double dxy = std::numeric_limits<double>::infinity();
    for (int y : support_y) dxy = std::min(dxy, graph.distance(x, y));
    r.corollary = 2.0 * static_cast<double>(support_y.size()) * b_norm * (growth - 1.0) * std::exp(-lambda * dxy);
    r.value = std::min(r.value, *r.corollary);
  }
  return r;
}

struct FrontPoint {
  double t;
  double distance;  // largest d(x,Y) with C_B(x,t) >= threshold (0 if none)
};

/// Level-set front of a profile and its least-squares slope against t.
inline std::vector<FrontPoint> level_set_front(const CommutatorProfile& prof, const SpinGraph& graph,
                                               const std::vector<int>& support_y, double threshold) {
  std::vector<FrontPoint> out;
  for (std::size_t k = 0; k < prof.times.size(); ++k) {
    double far = 0.0;
    for (std::size_t i = 0; i < prof.sites.size(); ++i) {
      if (prof.values[i][k] < threshold) continue;
      double d = std::numeric_limits<double>::infinity();
      for (int y : support_y) d = std::min(d, graph.distance(prof.sites[i], y));
      far = std::max(far, d);
    }
    out.push_back({prof.times[k], far});
  }
  return out;
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

inline LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("fit needs at least two points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw InputError("degenerate fit abscissae");
  LinearFit f;
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  const double mean = sy / n;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += e * e;
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  f.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

inline double front_velocity(const std::vector<FrontPoint>& front) {
  std::vector<double> t, d;
  for (const auto& p : front) {
    t.push_back(p.t);
    d.push_back(p.distance);
  }
  return least_squares(t, d).slope;
}

struct GroundState {
  double energy = 0.0;
  CVec vector;              // full tensor basis
  int twice_m = 0;          // sector the vector was taken from
  int twice_s = -1;         // total spin of the selected vector (-1 when not spin symmetric)
  int sector_degeneracy = 1;
  bool degenerate = false;
  double gap = 0.0;         // first level above the ground cluster
};

/**
 * Ground state by exact diagonalization. For a spin-rotation invariant H the
 * sector of smallest |M| holds a member of every multiplet; a degenerate
 * ground cluster is then resolved by total spin and the lowest spin chosen.
 */
inline GroundState ground_state(const SparseHermitian& h, double rel_tol = 1e-9) {
  const TensorBasis& basis = h.basis();
  GroundState g;
  const bool conserves_m = sector_leakage(h) == 0.0;
  bool symmetric = false;
  if (conserves_m) {
    const SparseC sx = total_spin(basis, 0).matrix();
    symmetric = commutator_residual(h.matrix(), sx) <= 1e-12 * std::max(1.0, h.max_entry());
  }
  SpectrumOptions opt;
  opt.want_vectors = true;
  SpectrumResult sp;
  if (symmetric) {
    int tmax = 0;
    for (int d : basis.dims()) tmax += d - 1;
    g.twice_m = tmax % 2;
    sp = eigen_spectrum(h, g.twice_m, opt);
  } else {
    sp = eigen_spectrum(h, std::nullopt, opt);
  }
  const RVec& ev = sp.eigenvalues;
  const double tol = rel_tol * std::max(1.0, std::abs(ev(ev.size() - 1) - ev(0)));
  int cluster = 1;
  while (cluster < ev.size() && ev(cluster) - ev(0) <= tol) ++cluster;
  g.energy = ev(0);
  g.sector_degeneracy = cluster;
  g.gap = cluster < ev.size() ? ev(cluster) - ev(0) : 0.0;
  g.vector = sp.eigenvectors.col(0);
  if (symmetric) {
    const CMat q = sp.eigenvectors.leftCols(cluster);
    const SparseC c = total_casimir(basis).matrix();
    const CMat cq = q.adjoint() * (c * q);
    const HermitianEigen ce = hermitian_eigen(CMat(0.5 * (cq + cq.adjoint())));
    g.vector = q * ce.vectors.col(0);
    const double cval = ce.values(0);
    g.twice_s = static_cast<int>(std::lround(-1.0 + std::sqrt(1.0 + 4.0 * cval)));
    int full = 0;
    for (Index i = 0; i < ce.values.size(); ++i) {
      const double s2 = -1.0 + std::sqrt(1.0 + 4.0 * std::max(0.0, ce.values(i)));
      full += static_cast<int>(std::lround(s2)) + 1;
    }
    g.degenerate = full > 1;
  } else {
    g.twice_s = -1;
    g.degenerate = cluster > 1;
  }
  g.vector.normalize();
  return g;
}

struct ClusteringCurve {
  std::vector<int> distances;
  std::vector<double> correlations;  // truncated, real part
  LinearFit fit;                     // log|c| against d over the window
  double rate = 0.0;                 // -slope
  std::vector<int> window;           // distances used in the fit
  double gap = 0.0;
  double lambda = 0.0;
  double phi_norm = 0.0;
  double mu = 0.0;
  bool degenerate = false;
  int ground_twice_s = -1;
};

/// mu = gamma lambda / (4 ||Phi||_lambda + gamma).
inline double clustering_mu(double gamma, double lambda, double phi_norm) {
  if (!(gamma > 0.0)) throw InputError("mu needs a positive gap");
  if (!(lambda > 0.0)) throw InputError("mu needs lambda > 0");
  return gamma * lambda / (4.0 * phi_norm + gamma);
}

/**
 * Truncated correlations <A_a B_{a+d}> - <A_a><B_{a+d}> along a chain, with
 * a log-linear fit that skips the `boundary_skip` sites nearest the far end.
 */
inline ClusteringCurve clustering_measure(const SpinGraph& graph, const SparseHermitian& h, const GroundState& gs,
                                          const CMat& a, int site_a, const CMat& b, double lambda,
                                          const Interaction& phi, int boundary_skip = 2) {
  const TensorBasis& basis = h.basis();
  ClusteringCurve cc;
  cc.gap = gs.gap;
  cc.lambda = lambda;
  cc.degenerate = gs.degenerate;
  cc.ground_twice_s = gs.twice_s;
  cc.phi_norm = interaction_norm(phi, graph, lambda, graph.max_local_dim());
  if (gs.gap > 0.0) cc.mu = clustering_mu(gs.gap, lambda, cc.phi_norm);
  const CMat omega = gs.vector;
  const CMat av = apply_site(basis, site_a, a, omega);
  const cplx mean_a = omega.col(0).dot(av.col(0));
  std::vector<double> xs, ys;
  for (int y = 0; y < graph.size(); ++y) {
    if (y <= site_a) continue;
    const double d = graph.distance(site_a, y);
    const CMat bv = apply_site(basis, y, b, omega);
    const cplx mean_b = omega.col(0).dot(bv.col(0));
    const cplx ab = av.col(0).dot(bv.col(0));  // A, B Hermitian: <A Omega, B Omega>
    const double c = (ab - mean_a * mean_b).real();
    cc.distances.push_back(static_cast<int>(std::lround(d)));
    cc.correlations.push_back(c);
    if (y < graph.size() - boundary_skip && std::abs(c) > 0.0) {
      cc.window.push_back(static_cast<int>(std::lround(d)));
      xs.push_back(d);
      ys.push_back(std::log(std::abs(c)));
    }
  }
  if (xs.size() >= 2) {
    cc.fit = least_squares(xs, ys);
    cc.rate = -cc.fit.slope;
  }
  return cc;
}

struct ImaginaryTimePoint {
  double b;
  double value;  // |<Omega, A alpha_{ib}(B') Omega>|, B' = B - <B>
  double bound;  // ||A|| ||B'|| e^{-gamma b}
};

/**
 * Imaginary-time correlations for a unique ground state. alpha_{ib}(B')Omega
 * = e^{-b(H - E_0)} B' Omega is expanded in the eigenbases of the
 * magnetization sectors that B' Omega reaches.
 */
inline std::vector<ImaginaryTimePoint> imaginary_time_check(const SparseHermitian& h, const GroundState& gs,
                                                            const CMat& a, int site_a, const CMat& b, int site_b,
                                                            const std::vector<double>& bs) {
  if (gs.degenerate) throw InputError("imaginary-time check needs a unique ground state");
  const TensorBasis& basis = h.basis();
  const CMat omega = gs.vector;
  CMat bo = apply_site(basis, site_b, b, omega);
  const cplx mean_b = omega.col(0).dot(bo.col(0));
  bo -= mean_b * omega;
  const CMat b_shift = b - mean_b * identity(b.rows());
  const CMat ao = apply_site(basis, site_a, a.adjoint(), omega);  // <Omega, A phi> = <A^dagger Omega, phi>
  const double bound_pref = operator_norm(a) * operator_norm(b_shift);

  std::vector<std::pair<double, cplx>> modes;  // (E - E0, <A^dagger Omega, v><v, B' Omega>)
  const bool conserves_m = sector_leakage(h) == 0.0;
  SpectrumOptions opt;
  opt.want_vectors = true;
  auto absorb = [&](const SpectrumResult& sp) {
    for (Index i = 0; i < sp.eigenvalues.size(); ++i) {
      const cplx w = ao.col(0).dot(sp.eigenvectors.col(i)) * sp.eigenvectors.col(i).dot(bo.col(0));
      modes.emplace_back(sp.eigenvalues(i) - gs.energy, w);
    }
  };
  if (conserves_m) {
    for (const auto& sec : magnetization_sectors(basis)) {
      double weight = 0.0;
      for (Index i : sec.indices) weight += std::norm(bo(i, 0));
      if (weight > 1e-28) absorb(eigen_spectrum(h, sec.twice_m, opt));
    }
  } else {
    absorb(eigen_spectrum(h, std::nullopt, opt));
  }
  std::vector<ImaginaryTimePoint> out;
  for (double bb : bs) {
    if (bb < 0.0) throw InputError("imaginary time must be nonnegative");
    cplx s{0.0, 0.0};
    for (const auto& [e, w] : modes) s += std::exp(-bb * e) * w;
    out.push_back({bb, std::abs(s), bound_pref * std::exp(-gs.gap * bb)});
  }
  return out;
}

}  // namespace spinlab
