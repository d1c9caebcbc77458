// Copyright 2026 The spinlab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file gapbound.hpp
 * @brief Martingale-method lower bounds for the spectral gap of
 *        frustration-free nearest-neighbour chains.
 *
 * For H_[1,L] = sum_x h_{x,x+1} with h >= 0, G_[a,b] is the orthogonal
 * projector onto ker sum_{x=a}^{b-1} h_{x,x+1}. Kernels are stored as
 * orthonormal bases on the sites of their interval and built incrementally:
 * ker H_[1,j+1] = ker(H_[1,j] (x) 1) intersected with ker h_{j,j+1}.
 *
 * Sites are numbered from 1. Intervals [a,b] are inclusive.
 */

#pragma once

#include "spinlab/linalg.hpp"
#include "spinlab/spectra.hpp"
#include "spinlab/spinops.hpp"

#include <Eigen/SVD>

#include <optional>
#include <vector>

namespace spinlab {

/// Translation-invariant nearest-neighbour chain with two-site term h >= 0.
struct ChainModel {
  SpinValue spin{2};
  CMat h;

  [[nodiscard]] int local_dim() const { return spin.dim(); }

  static ChainModel aklt() { return {SpinValue(2), aklt_bond()}; }

  /// Two-site term of `model` on uniform spins; optionally shifted so its minimum eigenvalue is 0.
  static ChainModel from_model(SpinValue spin, const ModelSpec& model, bool shift_to_nonnegative = false) {
    const SpinGraph pair = SpinGraph::chain(2, spin);
    CMat h = edge_term(pair, model, 0);
    if (shift_to_nonnegative) h -= hermitian_eigen(h, false).values(0) * identity(h.rows());
    return {spin, std::move(h)};
  }

  [[nodiscard]] SparseHermitian hamiltonian(int length) const {
    const SpinGraph g = SpinGraph::chain(length, spin);
    return build_hamiltonian(g, ModelSpec::custom(std::vector<CMat>(g.edges().size(), h)));
  }
};

struct KernelProjector {
  int a = 1, b = 1;
  int local_dim = 2;
  CMat basis;  // orthonormal columns on the d^(b-a+1) dimensional interval space

  [[nodiscard]] Index rank() const { return basis.cols(); }
  [[nodiscard]] bool empty() const { return basis.cols() == 0; }
  [[nodiscard]] CMat local_projector() const { return basis * basis.adjoint(); }
  /// Dense projector on H_[1,L].
  [[nodiscard]] CMat embed(int length) const {
    if (a < 1 || b > length || a > b) throw InputError("interval outside [1,L]");
    return kron(kron(identity(ipow(local_dim, a - 1)), local_projector()), identity(ipow(local_dim, length - b)));
  }
};

struct GapBoundOptions {
  double svd_cutoff = 1e-8;  // relative singular-value cutoff for kernel rank decisions
};

namespace detail {

/// Y = K (x) 1_{d^extra}: orthonormal basis of ran(G (x) 1).
inline CMat extend_right(const CMat& k, Index extra_dim) {
  CMat y = CMat::Zero(k.rows() * extra_dim, k.cols() * extra_dim);
  for (Index c = 0; c < k.cols(); ++c)
    for (Index e = 0; e < extra_dim; ++e)
      for (Index r = 0; r < k.rows(); ++r) y(r * extra_dim + e, c * extra_dim + e) = k(r, c);
  return y;
}

/// Right null vectors of `a` with singular values <= cutoff * sigma_max.
inline CMat null_space(const CMat& a, double rel_cutoff) {
  Eigen::JacobiSVD<CMat> svd(a, Eigen::ComputeFullV);
  const RVec& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_cutoff * smax && sv(i) > 0.0) ++rank;
  return svd.matrixV().rightCols(a.cols() - rank);
}

}  // namespace detail

/**
 * Kernel bases of H_[1,j] for j = 1..max_length, built incrementally. By
 * translation invariance the kernel of any interval of j sites has the same
 * basis.
 */
class KernelLadder {
 public:
  KernelLadder(ChainModel model, int max_length, GapBoundOptions opt = {})
      : model_(std::move(model)), opt_(opt) {
    const Index d = model_.local_dim();
    if (model_.h.rows() != d * d || hermiticity_residual(model_.h) > 1e-12)
      throw InputError("two-site term must be Hermitian on C^d (x) C^d");
    const HermitianEigen he = hermitian_eigen(model_.h);
    if (he.values(0) < -1e-12) throw InputError("martingale method needs h >= 0");
    const double hmax = he.values(he.values.size() - 1);
    gamma2_ = 0.0;
    for (Index i = 0; i < he.values.size(); ++i)
      if (he.values(i) > opt_.svd_cutoff * std::max(hmax, 1e-300)) {
        gamma2_ = he.values(i);
        break;
      }
    kernels_.push_back(identity(d));  // one site: G = 1
    for (int j = 1; j < max_length; ++j) {
      if (kernels_.back().cols() == 0) {
        kernels_.emplace_back(kernels_.back().rows() * d, 0);
        continue;
      }
      const CMat y = detail::extend_right(kernels_.back(), d);
      const CMat hy = apply_middle(model_.h, ipow(d, j - 1), d * d, 1, y);
      CMat k = y * detail::null_space(hy, opt_.svd_cutoff);
      if (k.cols() > 0) k = Eigen::HouseholderQR<CMat>(k).householderQ() * CMat::Identity(k.rows(), k.cols());
      kernels_.push_back(std::move(k));
    }
  }

  [[nodiscard]] const ChainModel& model() const { return model_; }
  [[nodiscard]] int max_length() const { return static_cast<int>(kernels_.size()); }
  [[nodiscard]] double gamma2() const { return gamma2_; }
  [[nodiscard]] double svd_cutoff() const { return opt_.svd_cutoff; }
  /// Orthonormal kernel basis for `length` consecutive sites.
  [[nodiscard]] const CMat& kernel(int length) const { return kernels_.at(static_cast<std::size_t>(length - 1)); }
  [[nodiscard]] KernelProjector projector(int a, int b) const {
    return {a, b, model_.local_dim(), kernel(b - a + 1)};
  }

 private:
  ChainModel model_;
  GapBoundOptions opt_;
  double gamma2_ = 0.0;
  std::vector<CMat> kernels_;
};

inline KernelProjector kernel_projector(const ChainModel& model, int a, int b, GapBoundOptions opt = {}) {
  if (a < 1 || b < a) throw InputError("invalid interval");
  return KernelLadder(model, b - a + 1, opt).projector(a, b);
}

/// Dense E_1..E_L on H_[1,L] (small L only).
inline std::vector<CMat> martingale_resolution(const KernelLadder& ladder, int length) {
  if (length < 2 || length > ladder.max_length()) throw InputError("resolution length out of range");
  std::vector<CMat> e;
  const CMat one = identity(ipow(ladder.model().local_dim(), length));
  e.push_back(one - ladder.projector(1, 2).embed(length));
  for (int n = 2; n <= length - 1; ++n)
    e.push_back(ladder.projector(1, n).embed(length) - ladder.projector(1, n + 1).embed(length));
  e.push_back(ladder.projector(1, length).embed(length));
  return e;
}

struct EpsilonResult {
  double epsilon = 0.0;
  std::vector<double> per_n;  // ||G_[n,n+1] E_n|| for n = 1..L-1
  bool below_threshold = false;  // epsilon < 1/sqrt(2)
};

/**
 * ||G_[n,n+1] E_n|| for n >= 2, computed on H_[1,n+1]: E_n projects onto the
 * complement of ker H_[1,n+1] inside ran(G_[1,n] (x) 1).
 */
inline double martingale_term(const KernelLadder& ladder, int n) {
  if (n == 1) return 0.0;  // G_[1,2](1 - G_[1,2]) = 0
  const Index d = ladder.model().local_dim();
  const CMat y = detail::extend_right(ladder.kernel(n), d);
  const CMat coeff = y.adjoint() * ladder.kernel(n + 1);
  const CMat w = y * orthogonal_complement(coeff, y.cols());
  if (w.cols() == 0) return 0.0;
  const CMat g2 = ladder.kernel(2) * ladder.kernel(2).adjoint();
  return operator_norm(apply_middle(g2, ipow(d, n - 1), d * d, 1, w));
}

inline EpsilonResult martingale_epsilon(const KernelLadder& ladder, int length) {
  if (length < 2 || length > ladder.max_length()) throw InputError("chain length out of range");
  EpsilonResult r;
  for (int n = 1; n <= length - 1; ++n) {
    r.per_n.push_back(martingale_term(ladder, n));
    r.epsilon = std::max(r.epsilon, r.per_n.back());
  }
  r.below_threshold = r.epsilon < 1.0 / std::sqrt(2.0);
  return r;
}

/// gamma2 (1 - sqrt(2) eps)^2, or nullopt when eps >= 1/sqrt(2).
inline std::optional<double> gap_lower_bound_73(double gamma2, double eps) {
  if (eps < 0.0) throw InputError("epsilon must be nonnegative");
  if (eps >= 1.0 / std::sqrt(2.0)) return std::nullopt;
  const double f = 1.0 - std::sqrt(2.0) * eps;
  return gamma2 * f * f;
}

/// lambda1(n+m) (1 - 2 sqrt(eps (1 - eps))).
inline double gap_lower_bound_74(double lambda1_nm, double eps_mn) {
  if (eps_mn < 0.0 || eps_mn > 1.0) throw InputError("epsilon_{m,n} must lie in [0,1]");
  return lambda1_nm * (1.0 - 2.0 * std::sqrt(eps_mn * (1.0 - eps_mn)));
}

struct OverlapEpsilon {
  double value = 0.0;
  bool empty_constraint = false;
};

/**
 * epsilon(m,n) = sup <psi, G_[0,n] psi> over unit psi with G_[-m,0] psi = psi
 * and G_[-m,n] psi = 0. Re-centred on m+n+1 sites: [-m,0] -> [1,m+1],
 * [0,n] -> [m+1,m+n+1].
 */
inline OverlapEpsilon spitzer_starr_epsilon(const KernelLadder& ladder, int m, int n) {
  if (m < 1 || n < 1) throw InputError("m and n must be >= 1");
  if (m + n + 1 > ladder.max_length()) throw InputError("kernel ladder too short for epsilon(m,n)");
  const Index d = ladder.model().local_dim();
  const CMat y = detail::extend_right(ladder.kernel(m + 1), ipow(d, n));
  const CMat coeff = y.adjoint() * ladder.kernel(m + n + 1);
  const CMat w = y * orthogonal_complement(coeff, y.cols());
  OverlapEpsilon out;
  if (w.cols() == 0) {
    out.empty_constraint = true;
    return out;
  }
  const CMat gr = ladder.kernel(n + 1) * ladder.kernel(n + 1).adjoint();
  const CMat gw = apply_middle(gr, ipow(d, m), ipow(d, n + 1), 1, w);
  const CMat compression = w.adjoint() * gw;
  out.value = std::clamp(hermitian_eigen(CMat(0.5 * (compression + compression.adjoint())), false)
                             .values(compression.rows() - 1),
                         0.0, 1.0);
  return out;
}

struct OverlapSup {
  double value = 0.0;
  std::vector<double> per_m;  // epsilon(m', n) for m' = m..m_max
  bool truncated = true;      // the supremum is over a finite window
};

/// epsilon_{m,n} approximated by max_{m <= m' <= m_max} epsilon(m', n).
inline OverlapSup spitzer_starr_sup(const KernelLadder& ladder, int m, int n, int m_max) {
  if (m_max < m) throw InputError("m_max must be >= m");
  OverlapSup s;
  for (int mp = m; mp <= m_max; ++mp) {
    s.per_m.push_back(spitzer_starr_epsilon(ladder, mp, n).value);
    s.value = std::max(s.value, s.per_m.back());
  }
  return s;
}

/// Smallest nonzero eigenvalue of H_[1,L] by exact diagonalization.
inline double exact_lambda1(const ChainModel& model, int length, double rel_cutoff = 1e-8) {
  if (length == 2) {
    const RVec ev = hermitian_eigen(model.h, false).values;
    for (Index i = 0; i < ev.size(); ++i)
      if (ev(i) > rel_cutoff * std::max(1.0, ev(ev.size() - 1))) return ev(i);
    throw NumericalError("two-site term has no nonzero eigenvalue");
  }
  const RVec ev = eigen_spectrum(model.hamiltonian(length)).eigenvalues;
  const double tol = rel_cutoff * std::max(1.0, ev(ev.size() - 1));
  if (std::abs(ev(0)) > tol) throw NumericalError("H_[1,L] has no zero-energy ground state");
  for (Index i = 0; i < ev.size(); ++i)
    if (ev(i) > tol) return ev(i);
  throw NumericalError("H_[1,L] has no nonzero eigenvalue");
}

struct GapCertificate {
  int length = 0;
  double gamma2 = 0.0;
  EpsilonResult epsilon;
  std::optional<double> bound73;
  int m = 1, n = 1;
  OverlapSup eps_mn;
  double lambda1_nm = 0.0;           // lambda1(n+m)
  std::optional<double> bound74;     // nullopt when eps_mn >= 1/2 (bound not positive)
  double exact_lambda1 = 0.0;
  double min_lambda1_window = 0.0;   // min_{2<=j<=L} lambda1(j)
  double svd_cutoff = 0.0;
};

/**
 * Both martingale bounds for H_[1,L] next to the exact gap. epsilon_{m,n}
 * uses m' up to L - n - 1 (at least m).
 */
inline GapCertificate gap_certificate(const ChainModel& model, int length, int m = 1, int n = 1,
                                      GapBoundOptions opt = {}) {
  if (length < 3) throw InputError("certificate needs L >= 3");
  const int m_max = std::max(m, length - n - 1);
  const KernelLadder ladder(model, std::max(length, m_max + n + 1), opt);
  GapCertificate c;
  c.length = length;
  c.m = m;
  c.n = n;
  c.svd_cutoff = opt.svd_cutoff;
  c.gamma2 = ladder.gamma2();
  c.epsilon = martingale_epsilon(ladder, length);
  c.bound73 = gap_lower_bound_73(c.gamma2, c.epsilon.epsilon);
  c.eps_mn = spitzer_starr_sup(ladder, m, n, m_max);
  c.lambda1_nm = exact_lambda1(model, n + m);
  const double b74 = gap_lower_bound_74(c.lambda1_nm, c.eps_mn.value);
  if (c.eps_mn.value < 0.5) c.bound74 = b74;
  c.exact_lambda1 = exact_lambda1(model, length);
  c.min_lambda1_window = c.exact_lambda1;
  for (int j = 2; j < length; ++j) c.min_lambda1_window = std::min(c.min_lambda1_window, exact_lambda1(model, j));
  return c;
}

}  // namespace spinlab
