// Copyright 2026 The spinlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "spinlab/spectra.hpp"

#include <gtest/gtest.h>

#include <random>

namespace spinlab {
namespace {

TEST(EigenSpectrum, SectorMergeMatchesDense) {
  const SparseHermitian h = build_hamiltonian(SpinGraph::chain(5, SpinValue(2)), ModelSpec::xxz(1.7));
  const RVec merged = eigen_spectrum(h).eigenvalues;
  const RVec dense = hermitian_eigen(h.dense(), false).values;
  ASSERT_EQ(merged.size(), dense.size());
  EXPECT_LT((merged - dense).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(EigenSpectrum, SingleSectorAndVectors) {
  const SparseHermitian h = build_hamiltonian(SpinGraph::chain(4, SpinValue(1)), ModelSpec::xxx());
  SpectrumOptions opt;
  opt.want_vectors = true;
  const SpectrumResult sp = eigen_spectrum(h, 0, opt);
  EXPECT_EQ(sp.eigenvalues.size(), 6);
  EXPECT_EQ(sp.label(), "M2=0");
  for (Index i = 0; i < sp.eigenvalues.size(); ++i)
    EXPECT_LT((h.matrix() * sp.eigenvectors.col(i) - sp.eigenvalues(i) * sp.eigenvectors.col(i)).norm(), 1e-10);
  EXPECT_THROW(eigen_spectrum(h, 7), InputError);
}

TEST(EigenSpectrum, LanczosAgreesWithDense) {
  const SparseHermitian h = build_hamiltonian(SpinGraph::chain(10, SpinValue(1), 1.0, true), ModelSpec::xxz(0.6));
  SpectrumOptions it;
  it.iterative = true;
  it.num_lowest = 2;
  const RVec a = eigen_spectrum(h, 0, it).eigenvalues;
  const RVec b = eigen_spectrum(h, 0).eigenvalues;
  EXPECT_NEAR(a(0), b(0), 1e-9);
  EXPECT_NEAR(a(1), b(1), 1e-9);
}

TEST(EigenSpectrum, DenseCap) {
  SpectrumOptions opt;
  opt.dense_cap = 10;
  const SparseHermitian h = build_hamiltonian(SpinGraph::chain(6, SpinValue(1)), ModelSpec::xxx());
  EXPECT_THROW(eigen_spectrum(h, 0, opt), CapExceeded);
}

TEST(LevelTable, SingleEdge) {
  const SpinLevelTable t = spin_level_table(build_hamiltonian(SpinGraph::chain(2, SpinValue(1)), ModelSpec::xxx()));
  EXPECT_NEAR(t.energy(2), -0.25, 1e-14);
  EXPECT_NEAR(t.energy(0), 0.75, 1e-14);
  EXPECT_EQ(t.accounted_dimension(), 4);
}

TEST(LevelTable, FiveSiteSpinOneFerroChain) {
  // dense Kronecker oracle (tests/oracles/generate_expected.py)
  const double expected[] = {-1.6200758584679071, -2.293885401361506, -2.769370039960058,
                             -3.2093910822533918, -3.6180339887498976, -4.0};
  const SpinLevelTable t = spin_level_table(build_hamiltonian(SpinGraph::chain(5, SpinValue(2)), ModelSpec::xxx()));
  for (int s = 0; s <= 5; ++s) EXPECT_NEAR(t.energy(2 * s), expected[s], 1e-10) << "S=" << s;
  EXPECT_EQ(t.accounted_dimension(), 243);
  EXPECT_NEAR(t.ground_energy(), t.energy(10), 1e-12);
}

TEST(LevelTable, RefusesXxz) {
  const SparseHermitian h = build_hamiltonian(SpinGraph::chain(3, SpinValue(1)), ModelSpec::xxz(2.0));
  EXPECT_THROW(spin_level_table(h), NotSpinSymmetric);
}

TEST(LevelTable, HighestWeightFallbackAgrees) {
  const SparseHermitian h = build_hamiltonian(SpinGraph::chain(5, SpinValue(2)), ModelSpec::xxx());
  const SpinLevelTable a = spin_level_table(h), b = spin_level_table_highest_weight(h);
  for (const auto& [ts, lvl] : a.entries) EXPECT_NEAR(lvl.energy_min, b.energy(ts), 1e-9);
}

TEST(Foel, SingleEdgeMarginOne) {
  const FoelReport r = foel_check(spin_level_table(build_hamiltonian(SpinGraph::chain(2, SpinValue(1)), ModelSpec::xxx())));
  EXPECT_TRUE(r.ordered);
  ASSERT_EQ(r.margins.size(), 1u);
  EXPECT_NEAR(r.margins[0].margin, 1.0, 1e-14);
}

TEST(Foel, RandomFerroChains) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int k = 0; k < 5; ++k) {
    std::vector<Site> sites;
    std::vector<Edge> edges;
    for (int i = 0; i < 6; ++i) sites.push_back({i, SpinValue(1)});
    for (int i = 0; i < 5; ++i) edges.push_back({i, i + 1, u(rng)});
    const FoelReport r = foel_check(spin_level_table(build_hamiltonian(SpinGraph(sites, edges), ModelSpec::xxx())));
    EXPECT_TRUE(r.ordered);
  }
}

TEST(Foel, MarginClassification) {
  EXPECT_EQ(classify_margin(1e-3), MarginStatus::Positive);
  EXPECT_EQ(classify_margin(5e-10), MarginStatus::Inconclusive);
  EXPECT_EQ(classify_margin(-1e-6), MarginStatus::Negative);
}

TEST(LiebMattis, TwoSiteSinglet) {
  const SpinGraph g = SpinGraph::chain(2, SpinValue(1));
  const LiebMattisReport r = lieb_mattis_check(g, {true, false}, lieb_mattis_hamiltonian(g, {true, false}));
  EXPECT_EQ(r.twice_target, 0);
  EXPECT_TRUE(r.ground_at_target);
  EXPECT_TRUE(r.ordered);
}

TEST(LiebMattis, FourSiteChain) {
  const double expected[] = {-1.616025403784438, -0.9571067811865481, 0.75};
  const SpinGraph g = SpinGraph::chain(4, SpinValue(1));
  const std::vector<bool> in_a = {true, false, true, false};
  const LiebMattisReport r = lieb_mattis_check(g, in_a, lieb_mattis_hamiltonian(g, in_a));
  for (int s = 0; s <= 2; ++s) EXPECT_NEAR(r.table.energy(2 * s), expected[s], 1e-10);
  EXPECT_TRUE(r.ground_at_target);
  EXPECT_TRUE(r.ordered);
  EXPECT_THROW(lieb_mattis_hamiltonian(g, {true, true, false, false}), InputError);
}

TEST(SectorGap, PolarizedSectorHasNoGap) {
  const SparseHermitian h = build_hamiltonian(SpinGraph::chain(3, SpinValue(1), 2.0), ModelSpec::xxx());
  const SectorGap g0 = sector_gap(h, twice_m_for_flips(h.basis(), 0));
  EXPECT_EQ(g0.dim, 1);
  EXPECT_FALSE(g0.gap.has_value());
}

TEST(SectorGap, OneFlipMatchesPathLaplacian) {
  // J = 2 on the path: the one-magnon block is the graph Laplacian shifted by a constant
  const SparseHermitian h = build_hamiltonian(SpinGraph::chain(3, SpinValue(1), 2.0), ModelSpec::xxx());
  const SectorGap g1 = sector_gap(h, twice_m_for_flips(h.basis(), 1));
  ASSERT_TRUE(g1.gap.has_value());
  EXPECT_NEAR(*g1.gap, 1.0, 1e-12);
}

TEST(GapScan, AkltOpenChainCluster) {
  const CMat pert = kron(spin_matrices(SpinValue(2)).z, spin_matrices(SpinValue(2)).z);
  const GapScan s = perturbed_gap_scan(6, pert, {-0.1, -0.05, 0.0, 0.05, 0.1});
  EXPECT_EQ(s.ground_cluster, 4);
  EXPECT_NEAR(s.unperturbed_gap, 0.39845123178043973, 1e-10);
  for (const auto& p : s.curve) EXPECT_GT(p.gap, 0.0);
}

TEST(GapScan, SlopeStableUnderRefinement) {
  const CMat pert = kron(spin_matrices(SpinValue(2)).z, spin_matrices(SpinValue(2)).z);
  auto slope = [&](double h) {
    const GapScan s = perturbed_gap_scan(6, pert, {-h, 0.0, h}, true);
    return (s.curve[2].gap - s.curve[0].gap) / (2 * h);
  };
  const double a = slope(0.02), b = slope(0.01);
  EXPECT_NEAR(a, b, 0.005 * std::max(1.0, std::abs(b)));
}

}  // namespace
}  // namespace spinlab
