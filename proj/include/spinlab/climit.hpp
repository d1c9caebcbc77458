// Copyright 2026 The spinlab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file climit.hpp
 * @brief Quantum and classical partition functions of Heisenberg-type
 *        models and the large-spin sandwich Z_C(b) <= Z_Q(b,S) <= Z_C(b(1+c/S)).
 *
 * Quantum Hamiltonians use normalized spins S^i/S and Z_Q is divided by
 * (2S+1)^|V|; the classical Hamiltonian substitutes unit vectors, and Z_C
 * integrates against the normalized product measure, so Z_Q(0) = Z_C(0) = 1.
 */

#pragma once

#include "spinlab/linalg.hpp"
#include "spinlab/spectra.hpp"
#include "spinlab/spinops.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

namespace spinlab {

inline void require_classical_model(const ModelSpec& model) {
  if (model.kind != ModelKind::XXX && model.kind != ModelKind::XXZ)
    throw InputError("classical limit supports the XXX and XXZ models only");
  if (model.kind == ModelKind::XXZ && (model.delta == 0.0 || !std::isfinite(model.delta)))
    throw InputError("XXZ anisotropy must be finite and nonzero");
}

/// The graph with every site carrying spin `spin`.
inline SpinGraph with_uniform_spin(const SpinGraph& g, SpinValue spin) {
  std::vector<Site> sites = g.sites();
  for (auto& s : sites) s.spin = spin;
  return SpinGraph(std::move(sites), g.edges());
}

/// Z_Q(beta, S) / (2S+1)^|V| for each beta, from the spectrum of H(S^i/S).
inline std::vector<double> quantum_partition(const SpinGraph& g, const ModelSpec& model, SpinValue spin,
                                             const std::vector<double>& betas, Index cap = kDefaultDimensionCap) {
  require_classical_model(model);
  const SpinGraph gs = with_uniform_spin(g, spin);
  const SparseHermitian h = build_hamiltonian(gs, model, cap);
  const RVec ev = eigen_spectrum(h).eigenvalues / (spin.s() * spin.s());
  const double e0 = ev.minCoeff();
  const double norm = std::pow(static_cast<double>(spin.dim()), g.size());
  std::vector<double> z;
  for (double b : betas) {
    double s = 0.0;
    for (Index i = 0; i < ev.size(); ++i) s += std::exp(-b * (ev(i) - e0));
    z.push_back(std::exp(-b * e0) * s / norm);
  }
  return z;
}

/// Gauss-Legendre nodes and weights on [-1, 1].
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  if (n < 1) throw InputError("quadrature order must be positive");
  std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    x[static_cast<std::size_t>(i)] = z;
    x[static_cast<std::size_t>(n - 1 - i)] = -z;
    w[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(n - 1 - i)] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

using UnitVector = std::array<double, 3>;

/// Classical energy with unit vectors in place of normalized spins.
inline double classical_energy(const SpinGraph& g, const ModelSpec& model, const std::vector<UnitVector>& omega) {
  double e = 0.0;
  for (const auto& ed : g.edges()) {
    const UnitVector& a = omega[static_cast<std::size_t>(ed.x)];
    const UnitVector& b = omega[static_cast<std::size_t>(ed.y)];
    if (model.kind == ModelKind::XXX)
      e -= ed.J * (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]);
    else
      e -= ed.J * ((a[0] * b[0] + a[1] * b[1]) / model.delta + a[2] * b[2]);
  }
  return e;
}

struct QuadratureSpec {
  int initial_order = 8;   // Gauss-Legendre nodes in cos(theta); 2x as many in phi
  int max_order = 1024;
  double rel_tol = 1e-8;   // successive doublings must agree to this
  int monte_carlo_samples = 200000;  // used above three sites
  std::uint64_t seed = 0;
};

struct ClassicalPartition {
  std::vector<double> values;
  std::vector<double> error;   // last refinement difference, or the Monte Carlo standard error
  int order = 0;               // final Gauss-Legendre order (0 for Monte Carlo)
  bool fixed_first_spin = false;
  bool monte_carlo = false;
};

namespace detail {

/// Product sphere quadrature of exp(-beta H) for one beta at one order.
inline double sphere_product_rule(const SpinGraph& g, const ModelSpec& model, double beta, int order, bool fix_first) {
  const auto [z, w] = gauss_legendre(order);
  const int nphi = 2 * order;
  std::vector<UnitVector> nodes;
  std::vector<double> weights;
  for (int i = 0; i < order; ++i)
    for (int k = 0; k < nphi; ++k) {
      const double phi = 2.0 * std::numbers::pi * k / nphi;
      const double r = std::sqrt(std::max(0.0, 1.0 - z[static_cast<std::size_t>(i)] * z[static_cast<std::size_t>(i)]));
      nodes.push_back({r * std::cos(phi), r * std::sin(phi), z[static_cast<std::size_t>(i)]});
      weights.push_back(w[static_cast<std::size_t>(i)] / (2.0 * nphi));
    }
  const int n = g.size();
  const int free_sites = fix_first ? n - 1 : n;
  std::vector<UnitVector> omega(static_cast<std::size_t>(n), UnitVector{0.0, 0.0, 1.0});
  std::vector<std::size_t> idx(static_cast<std::size_t>(free_sites), 0);
  const std::size_t m = nodes.size();
  // Energy shift keeps the exponentials bounded: H >= -sum |J| max(1, 1/|delta|).
  double emin = 0.0;
  for (const auto& e : g.edges())
    emin -= std::abs(e.J) * (model.kind == ModelKind::XXZ ? std::max(1.0, 1.0 / std::abs(model.delta)) : 1.0);
  double sum = 0.0;
  while (true) {
    double wt = 1.0;
    for (int s = 0; s < free_sites; ++s) {
      omega[static_cast<std::size_t>(fix_first ? s + 1 : s)] = nodes[idx[static_cast<std::size_t>(s)]];
      wt *= weights[idx[static_cast<std::size_t>(s)]];
    }
    sum += wt * std::exp(-beta * (classical_energy(g, model, omega) - emin));
    int s = 0;
    while (s < free_sites && ++idx[static_cast<std::size_t>(s)] == m) idx[static_cast<std::size_t>(s++)] = 0;
    if (s == free_sites) break;
  }
  return std::exp(-beta * emin) * sum;
}

}  // namespace detail

/**
 * Z_C(beta) = int exp(-beta H(Omega)) prod dOmega_x / 4pi. Up to three sites
 * the product rule is doubled until successive values agree; beyond that a
 * seeded Monte Carlo estimate with its standard error is returned.
 */
inline ClassicalPartition classical_partition(const SpinGraph& g, const ModelSpec& model,
                                              const std::vector<double>& betas, const QuadratureSpec& q = {}) {
  require_classical_model(model);
  ClassicalPartition out;
  const int n = g.size();
  out.fixed_first_spin = model.kind == ModelKind::XXX;
  if (n > 3) {
    out.monte_carlo = true;
    out.fixed_first_spin = false;
    std::mt19937_64 rng(q.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double b : betas) {
      double s = 0.0, s2 = 0.0;
      std::vector<UnitVector> omega(static_cast<std::size_t>(n));
      for (int k = 0; k < q.monte_carlo_samples; ++k) {
        for (auto& o : omega) {
          const double z = 2.0 * u(rng) - 1.0, phi = 2.0 * std::numbers::pi * u(rng);
          const double r = std::sqrt(1.0 - z * z);
          o = {r * std::cos(phi), r * std::sin(phi), z};
        }
        const double f = std::exp(-b * classical_energy(g, model, omega));
        s += f;
        s2 += f * f;
      }
      const double mean = s / q.monte_carlo_samples;
      out.values.push_back(mean);
      out.error.push_back(std::sqrt(std::max(0.0, s2 / q.monte_carlo_samples - mean * mean) / q.monte_carlo_samples));
    }
    return out;
  }
  for (double b : betas) {
    int order = q.initial_order;
    double prev = detail::sphere_product_rule(g, model, b, order, out.fixed_first_spin);
    while (true) {
      if (2 * order > q.max_order) throw NumericalError("sphere quadrature did not converge");
      order *= 2;
      const double cur = detail::sphere_product_rule(g, model, b, order, out.fixed_first_spin);
      const double diff = std::abs(cur - prev);
      prev = cur;
      if (diff <= q.rel_tol * std::abs(cur)) {
        out.values.push_back(cur);
        out.error.push_back(diff);
        out.order = std::max(out.order, order);
        break;
      }
    }
  }
  return out;
}

struct SandwichRow {
  double beta;
  double z_classical;
  double z_classical_error;
  std::vector<double> z_quantum;  // per S
  std::vector<bool> lower_ok;     // Z_C <= Z_Q + error
};

struct SandwichReport {
  std::vector<int> twice_spins;
  std::vector<SandwichRow> rows;
  std::vector<std::optional<double>> fitted_c;  // smallest c <= c_max with Z_Q <= Z_C(beta(1+c/S)) on the grid
  std::vector<double> free_energy_gap;          // max_beta |f_Q - f_C| per S
  bool lower_holds = true;
  double c_max = 10.0;
};

/**
 * Pointwise lower inequality and the upper inequality in the weak form
 * "some c <= c_max works", fitted per S by scan and bisection.
 */
inline SandwichReport sandwich_check(const SpinGraph& g, const ModelSpec& model, const std::vector<int>& twice_spins,
                                     const std::vector<double>& betas, const QuadratureSpec& q = {},
                                     double c_max = 10.0) {
  SandwichReport rep;
  rep.twice_spins = twice_spins;
  rep.c_max = c_max;
  const ClassicalPartition zc = classical_partition(g, model, betas, q);
  std::vector<std::vector<double>> zq;
  for (int ts : twice_spins) zq.push_back(quantum_partition(g, model, SpinValue(ts), betas));
  for (std::size_t k = 0; k < betas.size(); ++k) {
    SandwichRow row{betas[k], zc.values[k], zc.error[k], {}, {}};
    for (std::size_t s = 0; s < twice_spins.size(); ++s) {
      row.z_quantum.push_back(zq[s][k]);
      const bool ok = zc.values[k] <= zq[s][k] + zc.error[k] + 1e-12 * zq[s][k];
      row.lower_ok.push_back(ok);
      rep.lower_holds = rep.lower_holds && ok;
    }
    rep.rows.push_back(std::move(row));
  }
  for (std::size_t s = 0; s < twice_spins.size(); ++s) {
    const double spin = twice_spins[s] / 2.0;
    double gap = 0.0;
    for (std::size_t k = 0; k < betas.size(); ++k)
      if (betas[k] > 0.0) gap = std::max(gap, std::abs(std::log(zq[s][k]) - std::log(zc.values[k])) / betas[k]);
    rep.free_energy_gap.push_back(gap);
    auto holds = [&](double c) {
      std::vector<double> scaled;
      for (double b : betas)
        if (b > 0.0) scaled.push_back(b * (1.0 + c / spin));
      if (scaled.empty()) return true;
      const ClassicalPartition up = classical_partition(g, model, scaled, q);
      std::size_t j = 0;
      for (std::size_t k = 0; k < betas.size(); ++k) {
        if (betas[k] <= 0.0) continue;
        if (zq[s][k] > up.values[j] + up.error[j]) return false;
        ++j;
      }
      return true;
    };
    std::optional<double> c;
    if (holds(0.0)) {
      c = 0.0;
    } else {
      double lo = 0.0, hi = -1.0;
      for (double t = 0.5; t <= c_max + 1e-12; t += 0.5) {
        if (holds(t)) {
          hi = t;
          break;
        }
        lo = t;
      }
      if (hi > 0.0) {
        while (hi - lo > 1e-4) {
          const double mid = 0.5 * (lo + hi);
          (holds(mid) ? hi : lo) = mid;
        }
        c = hi;
      }
    }
    rep.fitted_c.push_back(c);
  }
  return rep;
}

}  // namespace spinlab
