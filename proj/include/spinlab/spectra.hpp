// Copyright 2026 The spinlab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file spectra.hpp
 * @brief Sector-resolved exact diagonalization, total-spin level tables,
 *        ordering checks (FOEL, Lieb-Mattis), sector gaps and perturbed
 *        gap scans.
 */

#pragma once

#include "spinlab/linalg.hpp"
#include "spinlab/spinops.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace spinlab {

struct SpectrumOptions {
  Index dense_cap = 4096;    // largest dense block diagonalized
  bool want_vectors = false;
  bool check_residuals = true;
  bool iterative = false;    // restarted Lanczos for the lowest eigenvalues
  int num_lowest = 1;        // iterative mode only
  int krylov_dim = 80;
  int max_restarts = 200;
};

struct SpectrumResult {
  RVec eigenvalues;             // ascending
  CMat eigenvectors;            // columns in the full tensor basis; empty unless requested
  std::optional<int> twice_m;   // nullopt for the full spectrum
  double max_residual = 0.0;    // max ||Hv - lambda v|| over returned pairs (0 if unchecked)
  double norm_estimate = 0.0;   // ||H|| used to scale the residual tolerance

  [[nodiscard]] std::string label() const { return twice_m ? "M2=" + std::to_string(*twice_m) : "full"; }
};

namespace detail {

inline SparseC sector_matrix(const SparseHermitian& h, std::span<const Index> idx) {
  std::vector<Index> pos(static_cast<std::size_t>(h.dim()), -1);
  for (std::size_t i = 0; i < idx.size(); ++i) pos[static_cast<std::size_t>(idx[i])] = static_cast<Index>(i);
  std::vector<Eigen::Triplet<cplx>> t;
  for (std::size_t c = 0; c < idx.size(); ++c)
    for (SparseC::InnerIterator it(h.matrix(), idx[c]); it; ++it) {
      const Index r = pos[static_cast<std::size_t>(it.row())];
      if (r >= 0) t.emplace_back(r, static_cast<Index>(c), it.value());
    }
  SparseC m(static_cast<Index>(idx.size()), static_cast<Index>(idx.size()));
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

/// Gershgorin-type upper bound on the operator norm.
inline double norm_upper_bound(const SparseC& m) {
  RVec colsum = RVec::Zero(m.cols());
  for (Index k = 0; k < m.outerSize(); ++k)
    for (SparseC::InnerIterator it(m, k); it; ++it) colsum(it.col()) += std::abs(it.value());
  return m.cols() ? colsum.maxCoeff() : 0.0;
}

struct DenseEig {
  RVec values;
  CMat vectors;
  double residual = 0.0;
};

inline DenseEig dense_sector_eigen(const CMat& block, bool vectors, bool check) {
  HermitianEigen es = hermitian_eigen(block, vectors || check);
  DenseEig out{es.values, {}, 0.0};
  if (check && block.rows() > 0) {
    const CMat r = block * es.vectors - es.vectors * es.values.asDiagonal();
    out.residual = r.colwise().norm().maxCoeff();
  }
  if (vectors) out.vectors = std::move(es.vectors);
  return out;
}

/**
 * Lowest `k` eigenpairs of a Hermitian sparse matrix by explicitly restarted
 * Lanczos with full reorthogonalization; converged vectors are locked and
 * deflated.
 */
inline DenseEig lanczos_lowest(const SparseC& m, int k, const SpectrumOptions& opt, double norm) {
  const Index n = m.rows();
  k = static_cast<int>(std::min<Index>(k, n));
  std::vector<CVec> locked;
  std::vector<double> values;
  const double tol = 1e-9 * std::max(norm, 1e-300);
  double worst = 0.0;
  auto orthogonalize = [&](CVec& v, const std::vector<CVec>& basis) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) v -= q * q.dot(v);
  };
  for (int j = 0; j < k; ++j) {
    CVec v(n);
    for (Index i = 0; i < n; ++i) v(i) = 1.0 + 0.37 * std::sin(1.0 + static_cast<double>(i) * (j + 1.618));
    orthogonalize(v, locked);
    v.normalize();
    bool done = false;
    double last_res = 0.0;
    for (int restart = 0; restart <= opt.max_restarts && !done; ++restart) {
      std::vector<CVec> q{v};
      std::vector<double> alpha, beta;
      const Index kdim = std::min<Index>(opt.krylov_dim, n - static_cast<Index>(locked.size()));
      for (Index it = 0; it < kdim; ++it) {
        CVec w = m * q.back();
        alpha.push_back(q.back().dot(w).real());
        orthogonalize(w, locked);
        orthogonalize(w, q);
        const double b = w.norm();
        if (it + 1 == kdim || b < 1e-12 * std::max(norm, 1.0)) break;
        beta.push_back(b);
        q.push_back(w / b);
      }
      const Index sz = static_cast<Index>(alpha.size());
      RMat t = RMat::Zero(sz, sz);
      for (Index i = 0; i < sz; ++i) {
        t(i, i) = alpha[static_cast<std::size_t>(i)];
        if (i + 1 < sz) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
      }
      Eigen::SelfAdjointEigenSolver<RMat> es(t);
      CVec x = CVec::Zero(n);
      for (Index i = 0; i < sz; ++i) x += es.eigenvectors()(i, 0) * q[static_cast<std::size_t>(i)];
      orthogonalize(x, locked);
      x.normalize();
      const double theta = x.dot(m * x).real();
      last_res = (m * x - theta * x).norm();
      if (last_res <= tol) {
        locked.push_back(x);
        values.push_back(theta);
        worst = std::max(worst, last_res);
        done = true;
      } else {
        v = x;
      }
    }
    if (!done)
      throw NumericalError("Lanczos did not converge; residual " + format_double(last_res));
  }
  // Locked values need not be sorted when eigenvalues are clustered.
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  DenseEig out;
  out.values.resize(static_cast<Index>(values.size()));
  out.vectors.resize(n, static_cast<Index>(values.size()));
  for (std::size_t i = 0; i < order.size(); ++i) {
    out.values(static_cast<Index>(i)) = values[order[i]];
    out.vectors.col(static_cast<Index>(i)) = locked[order[i]];
  }
  out.residual = worst;
  return out;
}

}  // namespace detail

/**
 * Eigenvalues of H, optionally restricted to the magnetization sector 2M.
 * Without a sector, an H that conserves total S^3 is diagonalized sector by
 * sector and the results merged.
 */
inline SpectrumResult eigen_spectrum(const SparseHermitian& h, std::optional<int> twice_m = std::nullopt,
                                     const SpectrumOptions& opt = {}) {
  if (h.hermiticity_residual() > 1e-12) throw InputError("eigen_spectrum: operator is not Hermitian");
  SpectrumResult out;
  out.twice_m = twice_m;
  std::vector<MagnetizationSector> blocks;
  const bool conserves_m = sector_leakage(h) == 0.0;
  if (twice_m) {
    if (!conserves_m) throw InputError("operator does not conserve total S^3; sectors are not invariant");
    for (auto& s : magnetization_sectors(h.basis()))
      if (s.twice_m == *twice_m) blocks.push_back(std::move(s));
    if (blocks.empty()) throw InputError("empty magnetization sector");
  } else if (conserves_m) {
    blocks = magnetization_sectors(h.basis());
  } else {
    std::vector<Index> all(static_cast<std::size_t>(h.dim()));
    std::iota(all.begin(), all.end(), Index{0});
    blocks.push_back({0, std::move(all)});
  }

  std::vector<std::pair<double, CVec>> pairs;
  std::vector<double> vals;
  for (const auto& blk : blocks) {
    const Index n = static_cast<Index>(blk.indices.size());
    detail::DenseEig eig;
    if (opt.iterative) {
      const SparseC m = detail::sector_matrix(h, blk.indices);
      const double nrm = detail::norm_upper_bound(m);
      out.norm_estimate = std::max(out.norm_estimate, nrm);
      eig = detail::lanczos_lowest(m, opt.num_lowest, opt, nrm);
    } else {
      if (n > opt.dense_cap)
        throw CapExceeded("sector dimension " + std::to_string(n) + " exceeds dense cap " + std::to_string(opt.dense_cap));
      eig = detail::dense_sector_eigen(h.block(blk.indices), opt.want_vectors, opt.check_residuals);
      if (n > 0)
        out.norm_estimate = std::max({out.norm_estimate, std::abs(eig.values(0)), std::abs(eig.values(n - 1))});
    }
    out.max_residual = std::max(out.max_residual, eig.residual);
    for (Index i = 0; i < eig.values.size(); ++i) {
      if (opt.want_vectors || opt.iterative) {
        CVec full = CVec::Zero(h.dim());
        for (Index r = 0; r < n; ++r) full(blk.indices[static_cast<std::size_t>(r)]) = eig.vectors(r, i);
        pairs.emplace_back(eig.values(i), std::move(full));
      } else {
        vals.push_back(eig.values(i));
      }
    }
  }
  if (opt.check_residuals && out.max_residual > 1e-9 * std::max(out.norm_estimate, 1.0))
    throw NumericalError("eigenpair residual " + format_double(out.max_residual) + " above tolerance");
  if (!pairs.empty()) {
    std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    out.eigenvalues.resize(static_cast<Index>(pairs.size()));
    if (opt.want_vectors) out.eigenvectors.resize(h.dim(), static_cast<Index>(pairs.size()));
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      out.eigenvalues(static_cast<Index>(i)) = pairs[i].first;
      if (opt.want_vectors) out.eigenvectors.col(static_cast<Index>(i)) = pairs[i].second;
    }
  } else {
    std::sort(vals.begin(), vals.end());
    out.eigenvalues = Eigen::Map<RVec>(vals.data(), static_cast<Index>(vals.size()));
  }
  return out;
}

/// Groups sorted values into (value, multiplicity) with an absolute tolerance.
inline std::vector<std::pair<double, int>> distinct_levels(const std::vector<double>& sorted, double tol) {
  std::vector<std::pair<double, int>> out;
  for (double v : sorted) {
    if (!out.empty() && std::abs(v - out.back().first) <= tol)
      ++out.back().second;
    else
      out.emplace_back(v, 1);
  }
  return out;
}

struct SpinLevel {
  double energy_min = 0.0;               // E(H, S)
  std::vector<double> multiplets;        // energies of every spin-S multiplet, ascending
  std::vector<std::pair<double, int>> levels;  // distinct energies with multiplet counts
};

struct SpinLevelTable {
  std::map<int, SpinLevel> entries;  // keyed by 2S
  int twice_s_min = 0;
  int twice_s_max = 0;
  double commutator_h_s3 = 0.0;
  double commutator_h_casimir = 0.0;

  [[nodiscard]] double energy(int twice_s) const { return entries.at(twice_s).energy_min; }
  [[nodiscard]] double ground_energy() const {
    double e = std::numeric_limits<double>::infinity();
    for (const auto& [_, lvl] : entries) e = std::min(e, lvl.energy_min);
    return e;
  }
  /// sum_S (2S+1) * (#multiplets at S).
  [[nodiscard]] Index accounted_dimension() const {
    Index d = 0;
    for (const auto& [ts, lvl] : entries) d += (ts + 1) * static_cast<Index>(lvl.multiplets.size());
    return d;
  }
};

/// [H, C] != 0: total spin is not a good quantum number.
class NotSpinSymmetric : public InputError {
 public:
  using InputError::InputError;
};

struct LevelTableOptions {
  double commutator_tol = 1e-10;
  double casimir_round_tol = 1e-6;
  double degeneracy_rel_tol = 1e-9;
  Index dense_cap = 4096;
};

/**
 * E(H,S) for every total spin S. Inside each sector M >= 0 the Casimir is
 * diagonalized, its eigenvalues rounded to S(S+1), and H is diagonalized on
 * the S = M eigenspace; each resulting eigenvalue is one spin-S multiplet.
 */
inline SpinLevelTable spin_level_table(const SparseHermitian& h, const LevelTableOptions& opt = {}) {
  const TensorBasis& basis = h.basis();
  const SparseHermitian sz = total_spin(basis, 2);
  const SparseHermitian cas = total_casimir(basis);
  SpinLevelTable table;
  const double scale = std::max(1.0, h.max_entry());
  table.commutator_h_s3 = commutator_residual(h.matrix(), sz.matrix());
  table.commutator_h_casimir = commutator_residual(h.matrix(), cas.matrix());
  if (table.commutator_h_s3 > opt.commutator_tol * scale || table.commutator_h_casimir > opt.commutator_tol * scale * std::max(1.0, cas.max_entry()))
    throw NotSpinSymmetric("Hamiltonian does not commute with the total spin Casimir (residual " +
                           format_double(table.commutator_h_casimir) +
                           "); use spin_level_table_highest_weight instead");
  for (int d : basis.dims()) table.twice_s_max += d - 1;

  std::vector<double> all;
  for (const auto& sec : magnetization_sectors(basis)) {
    if (sec.twice_m < 0) continue;
    const Index n = static_cast<Index>(sec.indices.size());
    if (n > opt.dense_cap) throw CapExceeded("sector dimension exceeds dense cap");
    const HermitianEigen ce = hermitian_eigen(cas.block(sec.indices));
    std::vector<Index> keep;
    for (Index i = 0; i < n; ++i) {
      const double c = ce.values(i);
      const double twice_s_real = std::sqrt(1.0 + 4.0 * std::max(c, 0.0)) - 1.0;
      const int twice_s = static_cast<int>(std::lround(twice_s_real));
      const double target = 0.25 * twice_s * (twice_s + 2);
      if (std::abs(c - target) > opt.casimir_round_tol)
        throw NumericalError("Casimir eigenvalue " + format_double(c) + " is not of the form S(S+1)");
      if (twice_s < sec.twice_m) throw NumericalError("total spin below |M| in a magnetization sector");
      if (twice_s == sec.twice_m) keep.push_back(i);
    }
    if (keep.empty()) continue;
    CMat q(n, static_cast<Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) q.col(static_cast<Index>(j)) = ce.vectors.col(keep[j]);
    const CMat hs = q.adjoint() * h.block(sec.indices) * q;
    const RVec ev = hermitian_eigen(CMat(0.5 * (hs + hs.adjoint())), false).values;
    SpinLevel lvl;
    lvl.multiplets.assign(ev.data(), ev.data() + ev.size());
    lvl.energy_min = ev(0);
    table.entries[sec.twice_m] = std::move(lvl);
    all.insert(all.end(), ev.data(), ev.data() + ev.size());
  }
  if (table.entries.empty()) throw NumericalError("empty level table");
  table.twice_s_min = table.entries.begin()->first;
  const auto [lo, hi] = std::minmax_element(all.begin(), all.end());
  const double tol = opt.degeneracy_rel_tol * std::max(*hi - *lo, 1.0);
  for (auto& [_, lvl] : table.entries) lvl.levels = distinct_levels(lvl.multiplets, tol);
  return table;
}

/**
 * Fallback for operators that conserve S^3 only: the levels "new" at
 * magnetization M are the sector-M spectrum minus the sector-(M+1) spectrum
 * (multiset difference within tolerance). Exact for SU(2)-symmetric H.
 */
inline SpinLevelTable spin_level_table_highest_weight(const SparseHermitian& h, double rel_tol = 1e-9) {
  SpinLevelTable table;
  for (int d : h.basis().dims()) table.twice_s_max += d - 1;
  std::vector<double> above;  // spectrum of sector M+1
  auto secs = magnetization_sectors(h.basis());
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  std::map<int, std::vector<double>> spectra;
  for (const auto& s : secs) {
    if (s.twice_m < 0) continue;
    const RVec ev = hermitian_eigen(h.block(s.indices), false).values;
    spectra[s.twice_m].assign(ev.data(), ev.data() + ev.size());
    lo = std::min(lo, ev(0));
    hi = std::max(hi, ev(ev.size() - 1));
  }
  const double tol = rel_tol * std::max(hi - lo, 1.0) * 1e3;
  for (auto it = spectra.rbegin(); it != spectra.rend(); ++it) {
    std::vector<double> fresh;
    std::size_t j = 0;
    for (double v : it->second) {
      while (j < above.size() && above[j] < v - tol) ++j;  // unmatched upper-sector value: ignore
      if (j < above.size() && std::abs(above[j] - v) <= tol)
        ++j;
      else
        fresh.push_back(v);
    }
    if (!fresh.empty()) {
      SpinLevel lvl;
      lvl.multiplets = fresh;
      lvl.energy_min = fresh.front();
      lvl.levels = distinct_levels(fresh, rel_tol * std::max(hi - lo, 1.0));
      table.entries[it->first] = std::move(lvl);
    }
    above = it->second;
  }
  table.twice_s_min = table.entries.begin()->first;
  return table;
}

enum class MarginStatus { Positive, Inconclusive, Negative };

inline std::string to_string(MarginStatus s) {
  switch (s) {
    case MarginStatus::Positive: return "positive";
    case MarginStatus::Inconclusive: return "inconclusive";
    case MarginStatus::Negative: return "negative";
  }
  return "?";
}

struct LevelMargin {
  int twice_s;         // S
  double margin;       // E(H, S-1) - E(H, S)
  MarginStatus status;
};

struct FoelReport {
  SpinLevelTable table;
  bool ordered = false;
  bool inconclusive = false;
  std::vector<LevelMargin> margins;
};

inline constexpr double kMarginTieTol = 1e-9;

inline MarginStatus classify_margin(double m) {
  if (m > kMarginTieTol) return MarginStatus::Positive;
  if (m >= 0.0) return MarginStatus::Inconclusive;
  return MarginStatus::Negative;
}

/// E(H,S) strictly decreasing in S over the whole table.
inline FoelReport foel_check(const SpinLevelTable& table) {
  FoelReport r;
  r.table = table;
  r.ordered = true;
  for (int ts = table.twice_s_min + 2; ts <= table.twice_s_max; ts += 2) {
    const double m = table.energy(ts - 2) - table.energy(ts);
    const MarginStatus st = classify_margin(m);
    r.margins.push_back({ts, m, st});
    r.ordered = r.ordered && st == MarginStatus::Positive;
    r.inconclusive = r.inconclusive || st == MarginStatus::Inconclusive;
  }
  return r;
}

struct LiebMattisReport {
  SpinLevelTable table;
  int twice_target = 0;          // 2|S_A - S_B|
  double ground_energy = 0.0;
  bool ground_at_target = false;
  bool ordered = false;          // E(H,S) increasing for S >= target
  std::vector<LevelMargin> margins;  // E(H,S) - E(H,S-1) for S > target
};

/**
 * H = -H_V + H_A + H_B: antiferromagnetic couplings J_xy S_x.S_y on the
 * edges of `bipartite` (every edge must cross the partition) and ferromagnetic
 * -J S_x.S_y on `intra` edges (each inside A or inside B).
 */
inline SparseHermitian lieb_mattis_hamiltonian(const SpinGraph& bipartite, const std::vector<bool>& in_a,
                                               const std::vector<Edge>& intra = {}) {
  if (static_cast<int>(in_a.size()) != bipartite.size()) throw InputError("partition size mismatch");
  for (const auto& e : bipartite.edges())
    if (in_a[e.x] == in_a[e.y]) throw InputError("invalid bipartition: edge does not cross A-B");
  for (const auto& e : intra)
    if (in_a[e.x] != in_a[e.y]) throw InputError("intra-sublattice edge crosses A-B");
  std::vector<Edge> all;
  for (const auto& e : bipartite.edges()) all.push_back({e.x, e.y, -e.J});
  for (const auto& e : intra) all.push_back(e);
  return build_hamiltonian(SpinGraph(bipartite.sites(), all), ModelSpec::xxx());
}

inline LiebMattisReport lieb_mattis_check(const SpinGraph& graph, const std::vector<bool>& in_a,
                                          const SparseHermitian& h) {
  if (static_cast<int>(in_a.size()) != graph.size()) throw InputError("partition size mismatch");
  for (const auto& e : graph.edges())
    if (in_a[e.x] == in_a[e.y]) throw InputError("invalid bipartition: edge does not cross A-B");
  int ta = 0, tb = 0;
  for (int x = 0; x < graph.size(); ++x) (in_a[x] ? ta : tb) += graph.sites()[x].spin.twice_s();
  LiebMattisReport r;
  r.table = spin_level_table(h);
  r.twice_target = std::abs(ta - tb);
  r.ground_energy = r.table.ground_energy();
  r.ground_at_target = r.table.entries.contains(r.twice_target) &&
                       r.table.energy(r.twice_target) <= r.ground_energy + kMarginTieTol;
  r.ordered = true;
  for (int ts = r.twice_target + 2; ts <= r.table.twice_s_max; ts += 2) {
    const double m = r.table.energy(ts) - r.table.energy(ts - 2);
    const MarginStatus st = classify_margin(m);
    r.margins.push_back({ts, m, st});
    r.ordered = r.ordered && st == MarginStatus::Positive;
  }
  return r;
}

struct SectorGap {
  int twice_m = 0;
  Index dim = 0;
  double ground = 0.0;
  std::optional<double> gap;  // nullopt: the whole sector is at the ground energy
  bool all_degenerate = false;
};

/// Smallest eigenvalue above the sector ground energy.
inline SectorGap sector_gap(const SparseHermitian& h, int twice_m, double rel_tol = 1e-9) {
  const SpectrumResult sp = eigen_spectrum(h, twice_m);
  SectorGap g;
  g.twice_m = twice_m;
  g.dim = sp.eigenvalues.size();
  g.ground = sp.eigenvalues(0);
  const double width = sp.eigenvalues(g.dim - 1) - g.ground;
  const double tol = rel_tol * std::max(width, std::max(1.0, std::abs(g.ground)));
  for (Index i = 1; i < g.dim; ++i)
    if (sp.eigenvalues(i) - g.ground > tol) {
      g.gap = sp.eigenvalues(i) - g.ground;
      break;
    }
  g.all_degenerate = !g.gap.has_value();
  return g;
}

/// Sector with n spins flipped down from the fully polarized state (spin-1/2 graphs: M = |V|/2 - n).
inline int twice_m_for_flips(const TensorBasis& basis, int n) {
  int tmax = 0;
  for (int d : basis.dims()) tmax += d - 1;
  return tmax - 2 * n;
}

struct GapScanPoint {
  double lambda;
  double gap;
};

struct GapScan {
  std::vector<GapScanPoint> curve;
  int ground_cluster = 0;     // number of (quasi-)ground states below the gap
  double unperturbed_gap = 0.0;
  double positive_lo = 0.0;   // largest grid interval around 0 with gap > 0
  double positive_hi = 0.0;
};

inline SparseHermitian perturbed_aklt_chain(int length, const CMat& local_term, double lambda, bool periodic = false) {
  const SpinGraph g = SpinGraph::chain(length, SpinValue(2), 1.0, periodic);
  Interaction phi = interaction_from_model(g, ModelSpec::aklt());
  for (const auto& e : g.edges()) phi.terms.push_back({{e.x, e.y}, lambda * local_term});
  return build_from_interaction(g, phi);
}

/**
 * Finite-volume gap of H_AKLT + lambda * sum_x Phi_{x,x+1} on a grid. The
 * gap is measured above the lowest `ground_cluster` eigenvalues, where the
 * cluster size is the ground degeneracy at lambda = 0 (4 for open chains).
 */
inline GapScan perturbed_gap_scan(int length, const CMat& local_term, const std::vector<double>& lambdas,
                                  bool periodic = false) {
  if (local_term.rows() != 9 || hermiticity_residual(local_term) > 1e-12)
    throw InputError("perturbation must be a Hermitian two-site spin-1 operator");
  if (std::find(lambdas.begin(), lambdas.end(), 0.0) == lambdas.end())
    throw InputError("lambda grid must include 0");
  GapScan scan;
  const RVec base = eigen_spectrum(perturbed_aklt_chain(length, local_term, 0.0, periodic)).eigenvalues;
  const double tol = 1e-9 * std::max(1.0, base(base.size() - 1) - base(0));
  int cluster = 1;
  while (cluster < base.size() && base(cluster) - base(0) <= tol) ++cluster;
  scan.ground_cluster = cluster;
  scan.unperturbed_gap = base(cluster) - base(0);
  for (double lam : lambdas) {
    const RVec ev = lam == 0.0 ? base : eigen_spectrum(perturbed_aklt_chain(length, local_term, lam, periodic)).eigenvalues;
    scan.curve.push_back({lam, ev(cluster) - ev(cluster - 1)});
  }
  std::sort(scan.curve.begin(), scan.curve.end(), [](auto& a, auto& b) { return a.lambda < b.lambda; });
  std::size_t zero = 0;
  while (scan.curve[zero].lambda != 0.0) ++zero;
  std::size_t lo = zero, hi = zero;
  while (lo > 0 && scan.curve[lo - 1].gap > tol) --lo;
  while (hi + 1 < scan.curve.size() && scan.curve[hi + 1].gap > tol) ++hi;
  scan.positive_lo = scan.curve[lo].lambda;
  scan.positive_hi = scan.curve[hi].lambda;
  return scan;
}

}  // namespace spinlab
