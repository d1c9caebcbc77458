// Copyright 2026 The spinlab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file ssep.hpp
 * @brief Symmetric simple exclusion process: generators on n-particle
 *        configuration spaces, the equivalence with the spin-1/2
 *        ferromagnet, and sector-gap scans.
 *
 * A configuration eta maps to the tensor basis state with S^3_x = eta_x - 1/2,
 * so an occupied vertex is spin up (local index 0) and n particles live in
 * the sector 2M = 2n - |V|.
 */

#pragma once

#include "spinlab/linalg.hpp"
#include "spinlab/spectra.hpp"
#include "spinlab/spinops.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <numeric>
#include <string>
#include <vector>

namespace spinlab {

struct RateEdge {
  int x = 0, y = 0;
  double rate = 1.0;
};

class RateGraph {
 public:
  RateGraph(int vertices, std::vector<RateEdge> edges) : n_(vertices), edges_(std::move(edges)) {
    if (n_ < 1) throw InputError("rate graph needs at least one vertex");
    std::set<std::pair<int, int>> seen;
    for (const auto& e : edges_) {
      if (e.x < 0 || e.y < 0 || e.x >= n_ || e.y >= n_) throw InputError("edge endpoint outside the vertex set");
      if (e.x == e.y) throw InputError("self-loop in rate graph");
      if (!(e.rate > 0.0) || !std::isfinite(e.rate)) throw InputError("rates must be finite and positive");
      if (!seen.insert(std::minmax(e.x, e.y)).second) throw InputError("duplicate edge in rate graph");
    }
  }

  [[nodiscard]] int vertices() const { return n_; }
  [[nodiscard]] const std::vector<RateEdge>& edges() const { return edges_; }

  /// Vertex sets of the connected components, each ascending.
  [[nodiscard]] std::vector<std::vector<int>> components() const {
    std::vector<int> parent(static_cast<std::size_t>(n_));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
      while (parent[static_cast<std::size_t>(v)] != v) v = parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
      return v;
    };
    for (const auto& e : edges_) parent[static_cast<std::size_t>(find(e.x))] = find(e.y);
    std::map<int, std::vector<int>> groups;
    for (int v = 0; v < n_; ++v) groups[find(v)].push_back(v);
    std::vector<std::vector<int>> out;
    for (auto& [_, g] : groups) out.push_back(std::move(g));
    std::sort(out.begin(), out.end());
    return out;
  }

  [[nodiscard]] bool connected() const { return components().size() == 1; }

  /// Induced subgraph on `vertices`, relabelled 0..k-1 in the given order.
  [[nodiscard]] RateGraph induced(const std::vector<int>& vertices) const {
    std::map<int, int> label;
    for (std::size_t i = 0; i < vertices.size(); ++i) label[vertices[i]] = static_cast<int>(i);
    std::vector<RateEdge> es;
    for (const auto& e : edges_)
      if (label.count(e.x) && label.count(e.y)) es.push_back({label[e.x], label[e.y], e.rate});
    return RateGraph(static_cast<int>(vertices.size()), std::move(es));
  }

  /// Spin-1/2 graph with couplings J = 2r.
  [[nodiscard]] SpinGraph spin_graph() const {
    std::vector<Site> sites;
    for (int v = 0; v < n_; ++v) sites.push_back({v, SpinValue(1)});
    std::vector<Edge> es;
    for (const auto& e : edges_) es.push_back({e.x, e.y, 2.0 * e.rate});
    return SpinGraph(std::move(sites), std::move(es));
  }

 private:
  int n_;
  std::vector<RateEdge> edges_;
};

/// {"vertices": N, "edges": [{"x", "y", "rate"}]}
inline RateGraph parse_rate_graph(const nlohmann::json& j) {
  try {
    detail::reject_unknown_keys(j, {"vertices", "edges"}, "graph");
    std::vector<RateEdge> es;
    for (const auto& e : j.at("edges")) {
      detail::reject_unknown_keys(e, {"x", "y", "rate"}, "graph edge");
      es.push_back({e.at("x").get<int>(), e.at("y").get<int>(), e.value("rate", 1.0)});
    }
    return RateGraph(j.at("vertices").get<int>(), std::move(es));
  } catch (const nlohmann::json::exception& ex) {
    throw InputError(std::string("graph block: ") + ex.what());
  }
}

/// n-particle configurations in lexicographic order of (eta_0, ..., eta_{V-1}).
class ConfigurationSpace {
 public:
  ConfigurationSpace(int vertices, int particles) : v_(vertices), n_(particles) {
    if (particles < 0 || particles > vertices) throw InputError("particle number out of range");
    if (vertices > 30) throw CapExceeded("too many vertices for configuration enumeration");
    for (std::uint32_t mask = 0; mask < (1u << vertices); ++mask) {
      std::vector<int> eta(static_cast<std::size_t>(vertices));
      int count = 0;
      for (int x = 0; x < vertices; ++x) count += eta[static_cast<std::size_t>(x)] = (mask >> (vertices - 1 - x)) & 1u;
      if (count == particles) configs_.push_back(std::move(eta));
    }
    for (std::size_t i = 0; i < configs_.size(); ++i) index_[configs_[i]] = static_cast<Index>(i);
  }

  [[nodiscard]] int vertices() const { return v_; }
  [[nodiscard]] int particles() const { return n_; }
  [[nodiscard]] Index size() const { return static_cast<Index>(configs_.size()); }
  [[nodiscard]] const std::vector<int>& operator[](Index i) const { return configs_[static_cast<std::size_t>(i)]; }
  [[nodiscard]] Index index_of(const std::vector<int>& eta) const { return index_.at(eta); }

  /// Tensor basis index of the spin state |eta>: local index 0 for an occupied vertex.
  [[nodiscard]] Index tensor_index(Index i) const {
    Index t = 0;
    for (int x : configs_[static_cast<std::size_t>(i)]) t = 2 * t + (x ? 0 : 1);
    return t;
  }

 private:
  int v_, n_;
  std::vector<std::vector<int>> configs_;
  std::map<std::vector<int>, Index> index_;
};

/// L f(eta) = sum_xy r_xy (f(eta) - f(eta^xy)), as a real symmetric matrix.
inline RMat ssep_generator(const RateGraph& g, int particles) {
  const ConfigurationSpace cs(g.vertices(), particles);
  RMat l = RMat::Zero(cs.size(), cs.size());
  for (Index i = 0; i < cs.size(); ++i)
    for (const auto& e : g.edges()) {
      std::vector<int> eta = cs[i];
      if (eta[static_cast<std::size_t>(e.x)] == eta[static_cast<std::size_t>(e.y)]) continue;
      std::swap(eta[static_cast<std::size_t>(e.x)], eta[static_cast<std::size_t>(e.y)]);
      l(i, i) += e.rate;
      l(i, cs.index_of(eta)) -= e.rate;
    }
  return l;
}

/// H = sum_xy r_xy (1 - t_xy) = H_XXX(J = 2r) + (sum_xy r_xy / 2) 1.
inline SparseHermitian ssep_hamiltonian(const RateGraph& g) {
  const SparseHermitian hx = build_hamiltonian(g.spin_graph(), ModelSpec::xxx());
  double offset = 0.0;
  for (const auto& e : g.edges()) offset += 0.5 * e.rate;
  SparseC id(hx.dim(), hx.dim());
  id.setIdentity();
  return SparseHermitian(SparseC(hx.matrix() + offset * id), hx.basis());
}

struct EquivalenceMismatch {
  int particles;
  Index row, col;
  double generator_entry;
  cplx hamiltonian_entry;
};

struct EquivalenceReport {
  bool equal = true;
  double max_deviation = 0.0;
  double offset = 0.0;       // H = H_XXX(J = 2r) + offset * 1
  double coupling_scale = 2.0;
  std::optional<EquivalenceMismatch> first_mismatch;
};

inline EquivalenceReport heisenberg_equivalence_check(const RateGraph& g, double tol = 1e-12) {
  EquivalenceReport rep;
  for (const auto& e : g.edges()) rep.offset += 0.5 * e.rate;
  const CMat h = ssep_hamiltonian(g).dense();
  for (int n = 0; n <= g.vertices(); ++n) {
    const ConfigurationSpace cs(g.vertices(), n);
    const RMat l = ssep_generator(g, n);
    for (Index j = 0; j < cs.size(); ++j)
      for (Index i = 0; i < cs.size(); ++i) {
        const cplx hv = h(cs.tensor_index(i), cs.tensor_index(j));
        const double dev = std::abs(hv - cplx(l(i, j), 0.0));
        rep.max_deviation = std::max(rep.max_deviation, dev);
        if (dev > tol && !rep.first_mismatch) {
          rep.equal = false;
          rep.first_mismatch = EquivalenceMismatch{n, i, j, l(i, j), hv};
        }
      }
  }
  return rep;
}

/// Max deviation of (1/2 - 2 S_x.S_y) from 1 - t_xy on the four two-site basis states.
inline double exchange_identity_residual() {
  const CMat lhs = 0.5 * identity(4) - 2.0 * spin_dot(SpinValue(1), SpinValue(1));
  CMat swap = CMat::Zero(4, 4);
  for (Index a = 0; a < 2; ++a)
    for (Index b = 0; b < 2; ++b) swap(b * 2 + a, a * 2 + b) = 1.0;
  return max_abs(lhs - (identity(4) - swap));
}

struct ComponentScan {
  std::vector<int> vertices;
  std::vector<double> lambda;  // lambda[n-1] = gap of the n-particle generator, n = 1..k-1
  bool verdict = true;         // lambda(n) = lambda(1) for every n
  double max_relative_deviation = 0.0;
};

struct AldousScan {
  bool connected = true;
  std::vector<ComponentScan> components;
  bool verdict = true;
};

/// Second smallest eigenvalue of L_n (its kernel is one-dimensional on connected graphs).
inline double ssep_gap(const RateGraph& g, int particles) {
  const RMat l = ssep_generator(g, particles);
  if (l.rows() < 2) throw InputError("sector has a single configuration");
  Eigen::SelfAdjointEigenSolver<RMat> es(l, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(1);
}

/**
 * lambda(n) for 1 <= n <= |V|-1 and the verdict |lambda(n)/lambda(1) - 1| <=
 * tol. Disconnected graphs are scanned per component.
 */
inline AldousScan aldous_scan(const RateGraph& g, double tol = 1e-8) {
  AldousScan scan;
  const auto comps = g.components();
  scan.connected = comps.size() == 1;
  for (const auto& verts : comps) {
    ComponentScan cs;
    cs.vertices = verts;
    const RateGraph sub = g.induced(verts);
    for (int n = 1; n <= sub.vertices() - 1; ++n) cs.lambda.push_back(ssep_gap(sub, n));
    for (double l : cs.lambda) {
      const double dev = std::abs(l / cs.lambda.front() - 1.0);
      cs.max_relative_deviation = std::max(cs.max_relative_deviation, dev);
    }
    cs.verdict = cs.max_relative_deviation <= tol;
    scan.verdict = scan.verdict && cs.verdict;
    scan.components.push_back(std::move(cs));
  }
  return scan;
}

struct StochasticityReport {
  double min_entry = 0.0;
  double max_row_sum_deviation = 0.0;
};

/// Entries and row sums of e^{-tL}.
inline StochasticityReport semigroup_check(const RMat& l, double t) {
  Eigen::SelfAdjointEigenSolver<RMat> es(l);
  const RVec decay = (-t * es.eigenvalues().array()).exp();
  const RMat p = es.eigenvectors() * decay.asDiagonal() * es.eigenvectors().transpose();
  StochasticityReport r;
  r.min_entry = p.minCoeff();
  r.max_row_sum_deviation = (p.rowwise().sum().array() - 1.0).abs().maxCoeff();
  return r;
}

}  // namespace spinlab
