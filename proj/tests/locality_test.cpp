// Copyright 2026 The spinlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "spinlab/locality.hpp"

#include <gtest/gtest.h>

#include <random>

namespace spinlab {
namespace {

CMat random_hermitian(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CMat a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
  return 0.5 * (a + a.adjoint());
}

TEST(Evolution, IdentityAtTimeZeroAndEnergyConservation) {
  const SparseHermitian h = build_hamiltonian(SpinGraph::chain(5, SpinValue(1)), ModelSpec::xxz(0.8));
  const SpectralDecomposition sd(h);
  const CMat a = random_hermitian(h.dim(), 1);
  EXPECT_LT(max_abs(sd.evolve(a, 0.0) - a), 1e-12);
  EXPECT_LT(max_abs(sd.evolve(h.dense(), 1.7) - h.dense()), 1e-10);
}

TEST(Evolution, GroupLawAndNorm) {
  const SparseHermitian h = build_hamiltonian(SpinGraph::chain(5, SpinValue(1)), ModelSpec::xxx());
  const SpectralDecomposition sd(h);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 4; ++k) {
    const CMat a = random_hermitian(h.dim(), 10 + k);
    const double t = u(rng), s = u(rng);
    EXPECT_LT(max_abs(sd.evolve(a, t + s) - sd.evolve(sd.evolve(a, s), t)), 1e-9);
    EXPECT_NEAR(operator_norm(sd.evolve(a, t)), operator_norm(a), 1e-9);
  }
  EXPECT_LT(max_abs(heisenberg_evolve(h, h.dense(), 0.3) - h.dense()), 1e-10);
}

TEST(Evolution, DenseCap) {
  const SparseHermitian h = build_hamiltonian(SpinGraph::chain(6, SpinValue(1)), ModelSpec::xxx());
  EXPECT_THROW(SpectralDecomposition(h, 32), CapExceeded);
}

TEST(LocalBasis, OrthonormalTracelessHermitian) {
  for (Index d = 2; d <= 4; ++d) {
    const auto b = traceless_hermitian_basis(d);
    ASSERT_EQ(static_cast<Index>(b.size()), d * d - 1);
    for (std::size_t i = 0; i < b.size(); ++i) {
      EXPECT_LT(std::abs(b[i].trace()), 1e-14);
      EXPECT_LT(hermiticity_residual(b[i]), 1e-15);
      for (std::size_t j = 0; j < b.size(); ++j)
        EXPECT_NEAR(std::abs((b[i] * b[j]).trace()), i == j ? 1.0 : 0.0, 1e-14);
    }
  }
}

TEST(Profile, LocalityAtTimeZero) {
  const SparseHermitian h = build_hamiltonian(SpinGraph::chain(4, SpinValue(1)), ModelSpec::xxx());
  const SpectralDecomposition sd(h);
  const CMat b = embed_site_dense(h.basis(), 1, spin_matrices(SpinValue(1)).z);
  const CommutatorProfile p = commutator_profile(sd, b, {0, 1, 2, 3}, {0.0});
  EXPECT_LT(p.values[0][0], 1e-12);
  EXPECT_NEAR(p.values[1][0], 1.0, 1e-6);  // sup ||[A, S^3]|| / ||A|| = 2 ||S^3||
  EXPECT_LT(p.values[2][0], 1e-12);
  EXPECT_LT(p.values[3][0], 1e-12);
}

TEST(Profile, BelowBoundOnSmallChain) {
  const SpinGraph g = SpinGraph::chain(6, SpinValue(1));
  const SparseHermitian h = build_hamiltonian(g, ModelSpec::xxx());
  const SpectralDecomposition sd(h);
  const CMat b = embed_site_dense(h.basis(), 2, spin_matrices(SpinValue(1)).z);
  const std::vector<double> times = {0.0, 0.01, 0.1, 1.0};
  const CommutatorProfile p = commutator_profile(sd, b, {0, 1, 2, 3, 4, 5}, times);
  const Interaction phi = interaction_from_model(g, ModelSpec::xxx());
  for (double lam : {0.5, 1.0}) {
    const double pn = interaction_norm(phi, g, lam, 2);
    for (int x = 0; x < 6; ++x)
      for (std::size_t k = 0; k < times.size(); ++k)
        EXPECT_LE(p.values[static_cast<std::size_t>(x)][k], lr_bound(g, pn, lam, {2}, 0.5, x, times[k]).value + 1e-9);
  }
}

TEST(Bound, MatchesFormulaEvaluation) {
  const SpinGraph g = SpinGraph::chain(8, SpinValue(1));
  const double pn = interaction_norm(interaction_from_model(g, ModelSpec::xxx()), g, 1.0, 2);
  EXPECT_NEAR(pn, 130.47752776603417, 1e-10);
  const LrBoundValue v = lr_bound(g, pn, 1.0, {4}, 0.5, 0, 0.001);
  ASSERT_TRUE(v.corollary.has_value());
  EXPECT_NEAR(*v.corollary, 0.005461161567053106, 1e-15);
  EXPECT_NEAR(v.sum_form, 0.005461161567053106, 1e-15);
  EXPECT_DOUBLE_EQ(v.trivial, 1.0);
}

TEST(Bound, ZeroAtTimeZeroOffSupportAndExponentialInDistance) {
  const SpinGraph g = SpinGraph::chain(8, SpinValue(1));
  EXPECT_EQ(lr_bound(g, 10.0, 1.0, {4}, 0.5, 0, 0.0).value, 0.0);
  const double b1 = *lr_bound(g, 10.0, 0.7, {4}, 0.5, 2, 0.01).corollary;
  const double b2 = *lr_bound(g, 10.0, 0.7, {4}, 0.5, 1, 0.01).corollary;
  EXPECT_NEAR(b2 / b1, std::exp(-0.7), 1e-12);
  EXPECT_THROW(lr_bound(g, 10.0, 0.0, {4}, 0.5, 0, 1.0), InputError);
  EXPECT_LE(lr_bound(g, 10.0, 1.0, {4}, 0.5, 1, 0.1).value, lr_bound(g, 10.0, 1.0, {4}, 0.5, 1, 0.2).value);
}

TEST(Front, LinearFit) {
  const LinearFit f = least_squares({0, 1, 2, 3}, {1, 3, 5, 7});
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  EXPECT_NEAR(f.r2, 1.0, 1e-14);
}

TEST(Clustering, AkltOpenChainSinglet) {
  const SpinGraph g = SpinGraph::chain(8, SpinValue(2));
  const SparseHermitian h = build_hamiltonian(g, ModelSpec::aklt());
  const GroundState gs = ground_state(h);
  EXPECT_TRUE(gs.degenerate);
  EXPECT_EQ(gs.twice_s, 0);
  EXPECT_NEAR(gs.energy, 0.0, 1e-10);
  const CMat sz = spin_matrices(SpinValue(2)).z;
  const ClusteringCurve c =
      clustering_measure(g, h, gs, sz, 2, sz, 1.0, interaction_from_model(g, ModelSpec::aklt()));
  // sparse-eigensolver oracle on the singlet ground state
  const double expected[] = {-0.4448507007921998, 0.14990859232175502, -0.05484460694698365};
  for (int d = 1; d <= 3; ++d) EXPECT_NEAR(c.correlations[static_cast<std::size_t>(d - 1)], expected[d - 1], 1e-8);
  EXPECT_EQ(c.window, (std::vector<int>{1, 2, 3}));
  EXPECT_GT(c.mu, 0.0);
  EXPECT_GE(c.rate, c.mu);
  EXPECT_GE(c.fit.r2, 0.99);
}

TEST(Clustering, IdentityObservablesGiveZero) {
  const SpinGraph g = SpinGraph::chain(6, SpinValue(2), 1.0, true);
  const SparseHermitian h = build_hamiltonian(g, ModelSpec::aklt());
  const GroundState gs = ground_state(h);
  const ClusteringCurve c =
      clustering_measure(g, h, gs, identity(3), 0, identity(3), 1.0, interaction_from_model(g, ModelSpec::aklt()), 0);
  for (double v : c.correlations) EXPECT_LT(std::abs(v), 1e-12);
}

TEST(Clustering, MuFormula) {
  EXPECT_NEAR(clustering_mu(0.5, 1.0, 2.0), 0.5 / 8.5, 1e-15);
  EXPECT_THROW(clustering_mu(0.0, 1.0, 2.0), InputError);
}

TEST(ImaginaryTime, TrivialBoundOnAkltRing) {
  const SpinGraph g = SpinGraph::chain(6, SpinValue(2), 1.0, true);
  const SparseHermitian h = build_hamiltonian(g, ModelSpec::aklt());
  const GroundState gs = ground_state(h);
  ASSERT_FALSE(gs.degenerate);
  EXPECT_GT(gs.gap, 0.0);
  const CMat sz = spin_matrices(SpinValue(2)).z;
  const auto pts = imaginary_time_check(h, gs, sz, 0, sz, 3, {0.0, 0.5, 1.0, 2.0, 4.0, 8.0});
  for (const auto& p : pts) EXPECT_LE(p.value, p.bound * (1 + 1e-10) + 1e-14) << "b=" << p.b;
  EXPECT_GT(pts.front().value, pts.back().value);
}

}  // namespace
}  // namespace spinlab
