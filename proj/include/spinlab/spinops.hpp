// Copyright 2026 The spinlab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file spinops.hpp
 * @brief Spin matrices, spin graphs, interactions and finite-volume
 *        Hamiltonians assembled as sparse Hermitian operators.
 *
 * Basis convention: site-major tensor order following the site list of the
 * graph (site 0 is the most significant factor); within a site the S^3
 * eigenbasis ordered m = s, s-1, ..., -s.
 *
 * Sign conventions (each builder states its own):
 * - XXX:   H = -sum_{(xy)} J_xy S_x . S_y          (ferromagnetic for J > 0)
 * - XXZ:   H = -sum_{(xy)} J_xy [ (1/Delta)(S^1_x S^1_y + S^2_x S^2_y) + S^3_x S^3_y ]
 * - AKLT:  H = sum_{(xy)} J_xy [ 1/3 + 1/2 S_x.S_y + 1/6 (S_x.S_y)^2 ]   (J = 1 is the
 *          standard model; the bracket is the projector onto total spin 2)
 * - Custom two-site: H = sum_{(xy)} h_xy, with h_xy acting on C^{n_x} (x) C^{n_y}.
 */

#pragma once

#include "spinlab/linalg.hpp"

#include <Eigen/Sparse>
#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace spinlab {

using SparseC = Eigen::SparseMatrix<cplx>;

/// Spin magnitude stored as 2s so that half-integers stay exact.
class SpinValue {
 public:
  explicit SpinValue(int twice_s) : twice_s_(twice_s) {
    if (twice_s < 1) throw InputError("spin magnitude 2s must be a positive integer");
  }
  [[nodiscard]] int twice_s() const { return twice_s_; }
  [[nodiscard]] int dim() const { return twice_s_ + 1; }
  [[nodiscard]] double s() const { return 0.5 * twice_s_; }
  friend bool operator==(const SpinValue&, const SpinValue&) = default;

 private:
  int twice_s_;
};

struct SpinMatrices {
  CMat x, y, z;
  [[nodiscard]] const CMat& operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

/// Standard spin-s matrices in the S^3 eigenbasis, m descending.
inline SpinMatrices spin_matrices(SpinValue spin) {
  const Index n = spin.dim();
  const double s = spin.s();
  CMat raise = CMat::Zero(n, n);
  for (Index i = 1; i < n; ++i) {
    const double m = s - static_cast<double>(i);
    raise(i - 1, i) = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
  }
  const CMat lower = raise.adjoint();
  SpinMatrices out;
  out.x = 0.5 * (raise + lower);
  out.y = (raise - lower) / (2.0 * kI);
  out.z = CMat::Zero(n, n);
  for (Index i = 0; i < n; ++i) out.z(i, i) = s - static_cast<double>(i);
  return out;
}

/// S_x . S_y on C^{n_x} (x) C^{n_y}.
inline CMat spin_dot(SpinValue a, SpinValue b) {
  const SpinMatrices sa = spin_matrices(a), sb = spin_matrices(b);
  CMat out = CMat::Zero(a.dim() * b.dim(), a.dim() * b.dim());
  for (int i = 0; i < 3; ++i) out += kron(sa[i], sb[i]);
  return out;
}

struct Site {
  int id;
  SpinValue spin;
};

/// Edge between site positions (indices into SpinGraph::sites()).
struct Edge {
  int x;
  int y;
  double J;
};

class SpinGraph {
 public:
  SpinGraph(std::vector<Site> sites, std::vector<Edge> edges,
            std::optional<std::vector<std::vector<double>>> metric = std::nullopt)
      : sites_(std::move(sites)), edges_(std::move(edges)) {
    validate();
    metric_ = metric ? std::move(*metric) : graph_distances();
    validate_metric();
  }

  /// Chain of `length` identical spins with uniform coupling J.
  static SpinGraph chain(int length, SpinValue spin, double J = 1.0, bool periodic = false) {
    std::vector<Site> sites;
    std::vector<Edge> edges;
    for (int i = 0; i < length; ++i) sites.push_back({i, spin});
    for (int i = 0; i + 1 < length; ++i) edges.push_back({i, i + 1, J});
    if (periodic && length > 2) edges.push_back({length - 1, 0, J});
    return SpinGraph(std::move(sites), std::move(edges));
  }

  [[nodiscard]] const std::vector<Site>& sites() const { return sites_; }
  [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
  [[nodiscard]] int size() const { return static_cast<int>(sites_.size()); }
  [[nodiscard]] double distance(int x, int y) const { return metric_.at(x).at(y); }
  [[nodiscard]] std::vector<int> local_dims() const {
    std::vector<int> d;
    for (const auto& s : sites_) d.push_back(s.spin.dim());
    return d;
  }
  [[nodiscard]] std::vector<int> twice_spins() const {
    std::vector<int> t;
    for (const auto& s : sites_) t.push_back(s.spin.twice_s());
    return t;
  }
  [[nodiscard]] int max_local_dim() const {
    int n = 0;
    for (const auto& s : sites_) n = std::max(n, s.spin.dim());
    return n;
  }
  /// Diameter of a set of site positions under the metric.
  [[nodiscard]] double diameter(std::span<const int> xs) const {
    double d = 0.0;
    for (int a : xs)
      for (int b : xs) d = std::max(d, distance(a, b));
    return d;
  }
  [[nodiscard]] int position_of(int id) const {
    for (int i = 0; i < size(); ++i)
      if (sites_[i].id == id) return i;
    throw InputError("unknown site id " + std::to_string(id));
  }

 private:
  void validate() const {
    std::set<int> ids;
    for (const auto& s : sites_)
      if (!ids.insert(s.id).second) throw InputError("duplicate site id " + std::to_string(s.id));
    std::set<std::pair<int, int>> seen;
    for (const auto& e : edges_) {
      if (e.x < 0 || e.y < 0 || e.x >= size() || e.y >= size()) throw InputError("edge references unknown site");
      if (e.x == e.y) throw InputError("self-loop at site " + std::to_string(sites_[e.x].id));
      if (!std::isfinite(e.J)) throw InputError("non-finite coupling");
      if (!seen.insert({std::min(e.x, e.y), std::max(e.x, e.y)}).second) throw InputError("duplicate edge");
    }
  }

  [[nodiscard]] std::vector<std::vector<double>> graph_distances() const {
    const int n = size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<int>> adj(n);
    for (const auto& e : edges_) {
      adj[e.x].push_back(e.y);
      adj[e.y].push_back(e.x);
    }
    std::vector<std::vector<double>> d(n, std::vector<double>(n, inf));
    for (int src = 0; src < n; ++src) {
      std::queue<int> q;
      d[src][src] = 0.0;
      q.push(src);
      while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (int v : adj[u])
          if (d[src][v] == inf) {
            d[src][v] = d[src][u] + 1.0;
            q.push(v);
          }
      }
    }
    return d;
  }

  void validate_metric() const {
    const int n = size();
    if (static_cast<int>(metric_.size()) != n) throw InputError("metric table has wrong size");
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(metric_[i].size()) != n) throw InputError("metric table has wrong size");
      if (metric_[i][i] != 0.0) throw InputError("metric must vanish on the diagonal");
      for (int j = 0; j < n; ++j) {
        if (metric_[i][j] != metric_[j][i]) throw InputError("metric must be symmetric");
        if (i != j && !(metric_[i][j] > 0.0)) throw InputError("metric must separate points");
        for (int k = 0; k < n; ++k)
          if (metric_[i][k] > metric_[i][j] + metric_[j][k] + 1e-12)
            throw InputError("metric violates the triangle inequality");
      }
    }
  }

  std::vector<Site> sites_;
  std::vector<Edge> edges_;
  std::vector<std::vector<double>> metric_;
};

enum class ModelKind { XXX, XXZ, AKLT, CustomTwoSite };

inline std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::XXX: return "XXX";
    case ModelKind::XXZ: return "XXZ";
    case ModelKind::AKLT: return "AKLT";
    case ModelKind::CustomTwoSite: return "custom";
  }
  return "?";
}

struct ModelSpec {
  ModelKind kind = ModelKind::XXX;
  double delta = 1.0;           // XXZ anisotropy
  std::vector<CMat> edge_terms;  // CustomTwoSite: one term per graph edge

  static ModelSpec xxx() { return {ModelKind::XXX, 1.0, {}}; }
  static ModelSpec xxz(double delta) {
    if (delta == 0.0 || !std::isfinite(delta)) throw InputError("XXZ anisotropy must be finite and nonzero");
    return {ModelKind::XXZ, delta, {}};
  }
  static ModelSpec aklt() { return {ModelKind::AKLT, 1.0, {}}; }
  static ModelSpec custom(std::vector<CMat> terms) { return {ModelKind::CustomTwoSite, 1.0, std::move(terms)}; }
};

/// Projector-valued AKLT bond term on two spin-1 sites.
inline CMat aklt_bond() {
  const CMat ss = spin_dot(SpinValue(2), SpinValue(2));
  return identity(9) / 3.0 + 0.5 * ss + (ss * ss) / 6.0;
}

/// The two-site operator contributed by edge `e` (without the embedding).
inline CMat edge_term(const SpinGraph& g, const ModelSpec& model, std::size_t edge_index) {
  const Edge& e = g.edges().at(edge_index);
  const SpinValue a = g.sites()[e.x].spin, b = g.sites()[e.y].spin;
  switch (model.kind) {
    case ModelKind::XXX:
      return -e.J * spin_dot(a, b);
    case ModelKind::XXZ: {
      if (model.delta == 0.0 || !std::isfinite(model.delta)) throw InputError("XXZ anisotropy must be finite and nonzero");
      const SpinMatrices sa = spin_matrices(a), sb = spin_matrices(b);
      return -e.J * ((kron(sa.x, sb.x) + kron(sa.y, sb.y)) / model.delta + kron(sa.z, sb.z));
    }
    case ModelKind::AKLT:
      if (a.twice_s() != 2 || b.twice_s() != 2) throw InputError("AKLT model requires spin-1 at every site");
      return e.J * aklt_bond();
    case ModelKind::CustomTwoSite: {
      if (model.edge_terms.size() != g.edges().size()) throw InputError("custom model needs one term per edge");
      const CMat& h = model.edge_terms[edge_index];
      if (h.rows() != a.dim() * b.dim() || h.cols() != h.rows()) throw InputError("custom edge term has wrong shape");
      if (hermiticity_residual(h) > 1e-12) throw InputError("custom edge term is not Hermitian");
      return h;
    }
  }
  throw InputError("unknown model kind");
}

/// Tensor-product basis descriptor: local dimensions in site order.
class TensorBasis {
 public:
  TensorBasis() = default;
  explicit TensorBasis(std::vector<int> dims) : dims_(std::move(dims)) {
    strides_.assign(dims_.size(), 1);
    for (int i = static_cast<int>(dims_.size()) - 2; i >= 0; --i) strides_[i] = strides_[i + 1] * dims_[i + 1];
    dim_ = 1;
    for (int d : dims_) dim_ *= d;
  }
  [[nodiscard]] Index dim() const { return dim_; }
  [[nodiscard]] int sites() const { return static_cast<int>(dims_.size()); }
  [[nodiscard]] const std::vector<int>& dims() const { return dims_; }
  [[nodiscard]] Index stride(int site) const { return strides_[site]; }
  [[nodiscard]] int digit(Index i, int site) const { return static_cast<int>((i / strides_[site]) % dims_[site]); }
  /// 2 * (total S^3 eigenvalue) of basis state i.
  [[nodiscard]] int twice_m(Index i) const {
    int t = 0;
    for (int x = 0; x < sites(); ++x) t += (dims_[x] - 1) - 2 * digit(i, x);
    return t;
  }
  [[nodiscard]] std::string ordering() const { return "site-major, m descending"; }
  friend bool operator==(const TensorBasis& a, const TensorBasis& b) { return a.dims_ == b.dims_; }

 private:
  std::vector<int> dims_;
  std::vector<Index> strides_;
  Index dim_ = 1;
};

inline constexpr Index kDefaultDimensionCap = 200000;

inline TensorBasis checked_basis(const std::vector<int>& dims, Index cap) {
  double d = 1.0;
  for (int n : dims) d *= n;
  if (d > static_cast<double>(cap))
    throw CapExceeded("Hilbert space dimension " + std::to_string(static_cast<long long>(d)) + " exceeds cap " +
                      std::to_string(cap));
  return TensorBasis(dims);
}

/// Sparse operator with its tensor-basis descriptor; canonical (sorted, duplicates summed).
class SparseHermitian {
 public:
  SparseHermitian() = default;
  SparseHermitian(SparseC m, TensorBasis basis) : m_(std::move(m)), basis_(std::move(basis)) {
    m_.makeCompressed();
    if (m_.rows() != basis_.dim() || m_.cols() != basis_.dim()) throw InputError("operator/basis dimension mismatch");
  }
  [[nodiscard]] Index dim() const { return m_.rows(); }
  [[nodiscard]] const SparseC& matrix() const { return m_; }
  [[nodiscard]] const TensorBasis& basis() const { return basis_; }
  [[nodiscard]] CMat dense() const { return CMat(m_); }
  [[nodiscard]] double hermiticity_residual() const {
    const SparseC diff = m_ - SparseC(m_.adjoint());
    double r = 0.0;
    for (Index k = 0; k < diff.outerSize(); ++k)
      for (SparseC::InnerIterator it(diff, k); it; ++it) r = std::max(r, std::abs(it.value()));
    return r;
  }
  /// Dense restriction to the given basis indices (rows and columns).
  [[nodiscard]] CMat block(std::span<const Index> idx) const {
    std::vector<Index> pos(static_cast<std::size_t>(dim()), -1);
    for (std::size_t i = 0; i < idx.size(); ++i) pos[static_cast<std::size_t>(idx[i])] = static_cast<Index>(i);
    const Index n = static_cast<Index>(idx.size());
    CMat out = CMat::Zero(n, n);
    for (Index c = 0; c < n; ++c)
      for (SparseC::InnerIterator it(m_, idx[static_cast<std::size_t>(c)]); it; ++it) {
        const Index r = pos[static_cast<std::size_t>(it.row())];
        if (r >= 0) out(r, c) = it.value();
      }
    return out;
  }
  /// Row-sorted coordinate triplets with exact zeros dropped.
  [[nodiscard]] std::vector<Eigen::Triplet<cplx>> triplets() const {
    std::vector<Eigen::Triplet<cplx>> t;
    for (Index k = 0; k < m_.outerSize(); ++k)
      for (SparseC::InnerIterator it(m_, k); it; ++it)
        if (it.value() != cplx{}) t.emplace_back(it.row(), it.col(), it.value());
    std::sort(t.begin(), t.end(), [](const auto& a, const auto& b) {
      return a.row() != b.row() ? a.row() < b.row() : a.col() < b.col();
    });
    return t;
  }
  [[nodiscard]] double max_entry() const {
    double r = 0.0;
    for (Index k = 0; k < m_.outerSize(); ++k)
      for (SparseC::InnerIterator it(m_, k); it; ++it) r = std::max(r, std::abs(it.value()));
    return r;
  }

 private:
  SparseC m_;
  TensorBasis basis_;
};

/// Appends triplets of `op` acting on `support` (site positions, op in the
/// tensor order of `support`) with identities elsewhere.
inline void embed_local(const CMat& op, std::span<const int> support, const TensorBasis& basis,
                        std::vector<Eigen::Triplet<cplx>>& out, cplx scale = 1.0) {
  Index local_dim = 1;
  for (int x : support) local_dim *= basis.dims()[x];
  if (op.rows() != local_dim || op.cols() != local_dim) throw InputError("local operator has wrong dimension");
  // Column b of op -> list of (row a, value).
  std::vector<std::vector<std::pair<Index, cplx>>> nz(static_cast<std::size_t>(local_dim));
  for (Index b = 0; b < local_dim; ++b)
    for (Index a = 0; a < local_dim; ++a)
      if (op(a, b) != cplx{}) nz[static_cast<std::size_t>(b)].emplace_back(a, scale * op(a, b));
  // Offset of local index a inside the global index.
  std::vector<Index> offset(static_cast<std::size_t>(local_dim), 0);
  for (Index a = 0; a < local_dim; ++a) {
    Index rem = a;
    for (int k = static_cast<int>(support.size()) - 1; k >= 0; --k) {
      const int x = support[static_cast<std::size_t>(k)];
      offset[static_cast<std::size_t>(a)] += (rem % basis.dims()[x]) * basis.stride(x);
      rem /= basis.dims()[x];
    }
  }
  for (Index i = 0; i < basis.dim(); ++i) {
    Index b = 0;
    for (int x : support) b = b * basis.dims()[x] + basis.digit(i, x);
    const Index base = i - offset[static_cast<std::size_t>(b)];
    for (const auto& [a, v] : nz[static_cast<std::size_t>(b)]) out.emplace_back(base + offset[static_cast<std::size_t>(a)], i, v);
  }
}

inline SparseHermitian assemble(const TensorBasis& basis, const std::vector<Eigen::Triplet<cplx>>& trips) {
  SparseC m(basis.dim(), basis.dim());
  m.setFromTriplets(trips.begin(), trips.end());
  m.prune(cplx{0.0, 0.0}, 0.0);
  return SparseHermitian(std::move(m), basis);
}

/// Finite-volume Hamiltonian of `model` on `graph`.
inline SparseHermitian build_hamiltonian(const SpinGraph& graph, const ModelSpec& model,
                                         Index cap = kDefaultDimensionCap) {
  const TensorBasis basis = checked_basis(graph.local_dims(), cap);
  std::vector<Eigen::Triplet<cplx>> trips;
  for (std::size_t k = 0; k < graph.edges().size(); ++k) {
    const Edge& e = graph.edges()[k];
    const int support[2] = {e.x, e.y};
    embed_local(edge_term(graph, model, k), support, basis, trips);
  }
  SparseHermitian h = assemble(basis, trips);
  if (h.hermiticity_residual() > 1e-12) throw NumericalError("assembled Hamiltonian is not Hermitian");
  return h;
}

/// Single local term of an interaction.
struct InteractionTerm {
  std::vector<int> support;  // site positions, in the tensor order of `op`
  CMat op;
};

/// Finite interaction Phi: X -> Phi(X).
struct Interaction {
  std::vector<InteractionTerm> terms;
};

inline Interaction interaction_from_model(const SpinGraph& graph, const ModelSpec& model) {
  Interaction phi;
  for (std::size_t k = 0; k < graph.edges().size(); ++k) {
    const Edge& e = graph.edges()[k];
    phi.terms.push_back({{e.x, e.y}, edge_term(graph, model, k)});
  }
  return phi;
}

inline SparseHermitian build_from_interaction(const SpinGraph& graph, const Interaction& phi,
                                              Index cap = kDefaultDimensionCap) {
  const TensorBasis basis = checked_basis(graph.local_dims(), cap);
  std::vector<Eigen::Triplet<cplx>> trips;
  for (const auto& t : phi.terms) embed_local(t.op, t.support, basis, trips);
  return assemble(basis, trips);
}

/**
 * The interaction norm
 *   sup_x sum_{X containing x} |X| ||Phi(X)|| N^{2|X|} e^{lambda D(X)},
 * with the operator norm and the graph metric diameter D.
 */
inline double interaction_norm(const Interaction& phi, const SpinGraph& graph, double lambda, int N) {
  if (!(lambda > 0.0)) throw InputError("interaction norm needs lambda > 0");
  if (N < graph.max_local_dim()) throw InputError("N must bound every local dimension");
  if (phi.terms.empty()) return 0.0;
  std::vector<double> per_site(static_cast<std::size_t>(graph.size()), 0.0);
  for (const auto& t : phi.terms) {
    std::set<int> uniq(t.support.begin(), t.support.end());
    if (uniq.size() != t.support.size()) throw InputError("interaction support repeats a site");
    for (int x : t.support)
      if (x < 0 || x >= graph.size()) throw InputError("interaction support outside the vertex set");
    if (hermiticity_residual(t.op) > 1e-12) throw InputError("interaction term is not Hermitian");
    const double size = static_cast<double>(t.support.size());
    const double w = size * operator_norm(t.op) * std::pow(static_cast<double>(N), 2.0 * size) *
                     std::exp(lambda * graph.diameter(t.support));
    if (!std::isfinite(w)) throw InputError("interaction term has unbounded weight");
    for (int x : t.support) per_site[static_cast<std::size_t>(x)] += w;
  }
  return *std::max_element(per_site.begin(), per_site.end());
}

struct MagnetizationSector {
  int twice_m;
  std::vector<Index> indices;  // ascending basis indices
};

/// Partition of the tensor basis into total-S^3 eigenspaces, M descending.
inline std::vector<MagnetizationSector> magnetization_sectors(const TensorBasis& basis) {
  std::map<int, std::vector<Index>, std::greater<>> by_m;
  for (Index i = 0; i < basis.dim(); ++i) by_m[basis.twice_m(i)].push_back(i);
  std::vector<MagnetizationSector> out;
  for (auto& [m, idx] : by_m) out.push_back({m, std::move(idx)});
  return out;
}

inline std::vector<MagnetizationSector> magnetization_sectors(const SpinGraph& graph,
                                                              Index cap = kDefaultDimensionCap) {
  return magnetization_sectors(checked_basis(graph.local_dims(), cap));
}

/// Total spin component sum_x S^i_x (i = 0, 1, 2).
inline SparseHermitian total_spin(const TensorBasis& basis, int component) {
  std::vector<Eigen::Triplet<cplx>> trips;
  for (int x = 0; x < basis.sites(); ++x) {
    const SpinMatrices s = spin_matrices(SpinValue(basis.dims()[x] - 1));
    const int support[1] = {x};
    embed_local(s[component], support, basis, trips);
  }
  return assemble(basis, trips);
}

/// Casimir C = S_V . S_V of the total spin.
inline SparseHermitian total_casimir(const TensorBasis& basis) {
  SparseC c(basis.dim(), basis.dim());
  for (int i = 0; i < 3; ++i) {
    const SparseC s = total_spin(basis, i).matrix();
    c += SparseC(s * s);
  }
  c.prune(cplx{0.0, 0.0}, 1e-14);
  return SparseHermitian(std::move(c), basis);
}

/// Max-entry of the commutator [A, B].
inline double commutator_residual(const SparseC& a, const SparseC& b) {
  const SparseC c = SparseC(a * b) - SparseC(b * a);
  double r = 0.0;
  for (Index k = 0; k < c.outerSize(); ++k)
    for (SparseC::InnerIterator it(c, k); it; ++it) r = std::max(r, std::abs(it.value()));
  return r;
}

/// Largest entry of H connecting different magnetization sectors.
inline double sector_leakage(const SparseHermitian& h) {
  double r = 0.0;
  const SparseC& m = h.matrix();
  for (Index k = 0; k < m.outerSize(); ++k)
    for (SparseC::InnerIterator it(m, k); it; ++it)
      if (h.basis().twice_m(it.row()) != h.basis().twice_m(it.col())) r = std::max(r, std::abs(it.value()));
  return r;
}

/// Dense embedding of a single-site operator.
inline CMat embed_site_dense(const TensorBasis& basis, int site, const CMat& op) {
  std::vector<Eigen::Triplet<cplx>> trips;
  const int support[1] = {site};
  embed_local(op, support, basis, trips);
  return assemble(basis, trips).dense();
}

// ---------------------------------------------------------------------------
// JSON model documents and CSV export
// ---------------------------------------------------------------------------

struct ModelDocument {
  SpinGraph graph;
  ModelSpec model;
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                                const std::string& where) {
  if (!j.is_object()) throw InputError(where + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw InputError("unknown key '" + key + "' in " + where);
  }
}

inline CMat parse_complex_matrix(const nlohmann::json& j) {
  reject_unknown_keys(j, {"re", "im"}, "custom term");
  const auto& re = j.at("re");
  const Index n = static_cast<Index>(re.size());
  CMat m = CMat::Zero(n, n);
  for (Index r = 0; r < n; ++r) {
    if (re[r].size() != static_cast<std::size_t>(n)) throw InputError("custom term must be square");
    for (Index c = 0; c < n; ++c) m(r, c) = re[r][c].get<double>();
  }
  if (j.contains("im")) {
    const auto& im = j.at("im");
    if (im.size() != static_cast<std::size_t>(n)) throw InputError("custom term im part has wrong shape");
    for (Index r = 0; r < n; ++r) {
      if (im[r].size() != static_cast<std::size_t>(n)) throw InputError("custom term im part has wrong shape");
      for (Index c = 0; c < n; ++c) m(r, c) += kI * im[r][c].get<double>();
    }
  }
  return m;
}

}  // namespace detail

/**
 * Parses {sites: [{id, twice_s}], edges: [{x, y, J}], model: {kind, delta?, terms?}}.
 * Edge endpoints are site ids. Unknown keys are rejected.
 */
inline ModelDocument parse_model_document(const nlohmann::json& j) {
  try {
    detail::reject_unknown_keys(j, {"sites", "edges", "model"}, "model document");
    std::vector<Site> sites;
    for (const auto& s : j.at("sites")) {
      detail::reject_unknown_keys(s, {"id", "twice_s"}, "site");
      sites.push_back({s.at("id").get<int>(), SpinValue(s.at("twice_s").get<int>())});
    }
    std::map<int, int> pos;
    for (std::size_t i = 0; i < sites.size(); ++i) pos[sites[i].id] = static_cast<int>(i);
    std::vector<Edge> edges;
    if (j.contains("edges")) {
      for (const auto& e : j.at("edges")) {
        detail::reject_unknown_keys(e, {"x", "y", "J"}, "edge");
        const auto x = pos.find(e.at("x").get<int>()), y = pos.find(e.at("y").get<int>());
        if (x == pos.end() || y == pos.end()) throw InputError("edge references an unknown site id");
        if (!e.at("J").is_number()) throw InputError("couplings must be real numbers");
        edges.push_back({x->second, y->second, e.value("J", 1.0)});
      }
    }
    SpinGraph graph(std::move(sites), std::move(edges));
    const auto& m = j.at("model");
    detail::reject_unknown_keys(m, {"kind", "delta", "terms"}, "model");
    const std::string kind = m.at("kind").get<std::string>();
    ModelSpec spec;
    if (kind == "XXX") {
      spec = ModelSpec::xxx();
    } else if (kind == "XXZ") {
      spec = ModelSpec::xxz(m.at("delta").get<double>());
    } else if (kind == "AKLT") {
      spec = ModelSpec::aklt();
    } else if (kind == "custom") {
      std::vector<CMat> terms;
      for (const auto& t : m.at("terms")) terms.push_back(detail::parse_complex_matrix(t));
      spec = ModelSpec::custom(std::move(terms));
    } else {
      throw InputError("unknown model kind '" + kind + "'");
    }
    for (std::size_t k = 0; k < graph.edges().size(); ++k) (void)edge_term(graph, spec, k);
    return {std::move(graph), std::move(spec)};
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed model document: ") + e.what());
  }
}

/// Shortest round-trip decimal representation.
inline std::string format_double(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// CSV of (row, col, re, im) with a comment header naming dimension and ordering.
inline void write_triplets_csv(std::ostream& os, const SparseHermitian& h) {
  os << "# dim=" << h.dim() << " dims=";
  for (std::size_t i = 0; i < h.basis().dims().size(); ++i) os << (i ? "x" : "") << h.basis().dims()[i];
  os << " ordering=" << h.basis().ordering() << "\n";
  os << "row,col,re,im\n";
  for (const auto& t : h.triplets())
    os << t.row() << ',' << t.col() << ',' << format_double(t.value().real()) << ','
       << format_double(t.value().imag()) << '\n';
}

}  // namespace spinlab
