// Copyright 2026 The spinlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "spinlab/spinops.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

namespace spinlab {
namespace {

RVec full_eigenvalues(const SparseHermitian& h) { return hermitian_eigen(h.dense(), false).values; }

TEST(SpinMatrices, CommutationAndCasimir) {
  for (int ts = 1; ts <= 5; ++ts) {
    const SpinValue s(ts);
    const SpinMatrices m = spin_matrices(s);
    EXPECT_LT(max_abs(m.x * m.y - m.y * m.x - kI * m.z), 1e-14);
    const CMat c = m.x * m.x + m.y * m.y + m.z * m.z;
    EXPECT_LT(max_abs(c - s.s() * (s.s() + 1.0) * identity(s.dim())), 1e-13);
    EXPECT_DOUBLE_EQ(m.z(0, 0).real(), s.s());
  }
}

TEST(SpinValue, RejectsNonPositive) {
  EXPECT_THROW(SpinValue(0), InputError);
  EXPECT_THROW(SpinValue(-3), InputError);
}

TEST(Hamiltonian, SingleEdgeSinglet) {
  const SparseHermitian h = build_hamiltonian(SpinGraph::chain(2, SpinValue(1)), ModelSpec::xxx());
  const RVec ev = full_eigenvalues(h);
  EXPECT_NEAR(ev(0), -0.25, 1e-14);
  EXPECT_NEAR(ev(1), -0.25, 1e-14);
  EXPECT_NEAR(ev(2), -0.25, 1e-14);
  EXPECT_NEAR(ev(3), 0.75, 1e-14);
}

TEST(Hamiltonian, ThreeSiteChainMatchesBruteForce) {
  const double expected[] = {-0.5, -0.5, -0.5, -0.5, 0.0, 0.0, 1.0, 1.0};
  const RVec ev = full_eigenvalues(build_hamiltonian(SpinGraph::chain(3, SpinValue(1)), ModelSpec::xxx()));
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(ev(i), expected[i], 1e-12);
}

TEST(Hamiltonian, FourSiteRingMatchesBruteForce) {
  const double expected[] = {-1, -1, -1, -1, -1, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 2};
  const RVec ev = full_eigenvalues(build_hamiltonian(SpinGraph::chain(4, SpinValue(1), 1.0, true), ModelSpec::xxx()));
  for (int i = 0; i < 16; ++i) EXPECT_NEAR(ev(i), expected[i], 1e-12);
}

TEST(Hamiltonian, AkltBondIsSpinTwoProjector) {
  const CMat h = aklt_bond();
  EXPECT_LT(max_abs(h * h - h), 1e-14);
  const RVec ev = hermitian_eigen(h, false).values;
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(ev(i), 0.0, 1e-14);
  for (int i = 4; i < 9; ++i) EXPECT_NEAR(ev(i), 1.0, 1e-14);
}

TEST(Hamiltonian, HermitianAndSectorDiagonal) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Site> sites = {{0, SpinValue(1)}, {1, SpinValue(2)}, {2, SpinValue(3)}, {3, SpinValue(1)}};
  std::vector<Edge> edges = {{0, 1, u(rng)}, {1, 2, u(rng)}, {2, 3, u(rng)}, {3, 0, u(rng)}, {0, 2, u(rng)}};
  const SpinGraph g(sites, edges);
  for (const ModelSpec& m : {ModelSpec::xxx(), ModelSpec::xxz(0.7)}) {
    const SparseHermitian h = build_hamiltonian(g, m);
    EXPECT_LE(h.hermiticity_residual(), 1e-12);
    EXPECT_EQ(sector_leakage(h), 0.0);
  }
}

TEST(Hamiltonian, XxzReducesToXxxAtUnitAnisotropy) {
  const SpinGraph g = SpinGraph::chain(4, SpinValue(2));
  const CMat a = build_hamiltonian(g, ModelSpec::xxx()).dense();
  const CMat b = build_hamiltonian(g, ModelSpec::xxz(1.0)).dense();
  EXPECT_LT(max_abs(a - b), 1e-14);
  EXPECT_THROW(ModelSpec::xxz(0.0), InputError);
}

TEST(Hamiltonian, PolarizedStateIsGroundStateOfFerromagnet) {
  const SpinGraph g = SpinGraph::chain(6, SpinValue(1), 1.3);
  const SparseHermitian h = build_hamiltonian(g, ModelSpec::xxx());
  CVec up = CVec::Zero(h.dim());
  up(0) = 1.0;
  const CVec hv = h.matrix() * up;
  const double e = -1.3 * 5 * 0.25;
  EXPECT_LT((hv - e * up).norm(), 1e-12);
  EXPECT_NEAR(full_eigenvalues(h)(0), e, 1e-12);
}

TEST(Hamiltonian, DimensionCap) {
  EXPECT_THROW(build_hamiltonian(SpinGraph::chain(12, SpinValue(2)), ModelSpec::xxx(), 1000), CapExceeded);
}

TEST(Graph, ValidationErrors) {
  EXPECT_THROW(SpinGraph({{0, SpinValue(1)}, {0, SpinValue(1)}}, {}), InputError);
  EXPECT_THROW(SpinGraph({{0, SpinValue(1)}, {1, SpinValue(1)}}, {{0, 0, 1.0}}), InputError);
  EXPECT_THROW(SpinGraph({{0, SpinValue(1)}, {1, SpinValue(1)}}, {{0, 1, 1.0}, {1, 0, 1.0}}), InputError);
}

TEST(Graph, ChainDistances) {
  const SpinGraph g = SpinGraph::chain(6, SpinValue(1));
  EXPECT_EQ(g.distance(0, 5), 5.0);
  const SpinGraph r = SpinGraph::chain(6, SpinValue(1), 1.0, true);
  EXPECT_EQ(r.distance(0, 5), 1.0);
  EXPECT_EQ(r.distance(0, 3), 3.0);
}

TEST(Sectors, PartitionTheBasis) {
  const TensorBasis b({2, 3, 2});
  const auto secs = magnetization_sectors(b);
  Index total = 0;
  for (std::size_t i = 0; i < secs.size(); ++i) {
    total += static_cast<Index>(secs[i].indices.size());
    if (i) EXPECT_GT(secs[i - 1].twice_m, secs[i].twice_m);
  }
  EXPECT_EQ(total, 12);
  EXPECT_EQ(secs.front().twice_m, 4);
}

TEST(Interaction, NormMatchesFormula) {
  const SpinGraph g = SpinGraph::chain(4, SpinValue(1));
  const Interaction phi = interaction_from_model(g, ModelSpec::xxx());
  // interior site: two bonds, |X| = 2, ||h|| = 3/4, N = 2, D = 1
  const double expected = 2 * 2 * 0.75 * 16 * std::exp(0.5);
  EXPECT_NEAR(interaction_norm(phi, g, 0.5, 2), expected, 1e-12);
  EXPECT_THROW(interaction_norm(phi, g, 0.0, 2), InputError);
}

TEST(Json, ParsesAndRejectsUnknownKeys) {
  const auto j = nlohmann::json::parse(R"({"sites": [{"id": 5, "twice_s": 1}, {"id": 9, "twice_s": 1}],
    "edges": [{"x": 5, "y": 9, "J": 1.0}], "model": {"kind": "XXX"}})");
  const ModelDocument doc = parse_model_document(j);
  EXPECT_EQ(doc.graph.size(), 2);
  EXPECT_EQ(doc.graph.edges()[0].y, 1);
  auto bad = j;
  bad["extra"] = 1;
  EXPECT_THROW(parse_model_document(bad), InputError);
  auto bad_kind = j;
  bad_kind["model"]["kind"] = "Ising";
  EXPECT_THROW(parse_model_document(bad_kind), InputError);
  EXPECT_THROW(parse_model_document(nlohmann::json::parse(R"({"sites": 3})")), InputError);
}

TEST(Csv, TripletsSortedWithHeader) {
  const SparseHermitian h = build_hamiltonian(SpinGraph::chain(2, SpinValue(1)), ModelSpec::xxx());
  std::ostringstream os;
  write_triplets_csv(os, h);
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("# dim=4 dims=2x2", 0), 0u);
  EXPECT_NE(s.find("row,col,re,im\n0,0,-0.25,0\n"), std::string::npos);
}

TEST(Format, RoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 6.02214076e23}) EXPECT_EQ(std::stod(format_double(v)), v);
}

}  // namespace
}  // namespace spinlab
