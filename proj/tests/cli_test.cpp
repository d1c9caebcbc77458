// Copyright 2026 The spinlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "spinlab/cli.hpp"

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace spinlab::cli {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("spinlab_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p;
}

int invoke(const std::string& args) {
  const std::string cmd = std::string(SPINLAB_CLI_PATH) + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string config(const std::string& name) { return std::string(SPINLAB_CONFIG_DIR) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path write_config(const std::string& name, const std::string& body) {
  const fs::path p = scratch(name);
  std::ofstream(p) << body;
  return p;
}

TEST(Cli, FoelOnSpinOneChain) {
  const fs::path out = scratch("foel");
  EXPECT_EQ(invoke("foel --config " + config("foel_spin1_chain5.json") + " --out " + out.string()), 0);
  const json rec = json::parse(slurp(out / "run.json"));
  EXPECT_TRUE(rec["summary"]["ordered"].get<bool>());
  EXPECT_EQ(rec["outputs"], json::array({"levels.csv"}));
  EXPECT_EQ(rec["model_hash"].get<std::string>().size(), 16u);
  EXPECT_TRUE(fs::exists(out / "levels.csv"));
}

TEST(Cli, MalformedConfigWritesNothing) {
  const fs::path cfg = write_config("bad.json", "{\"model\": {\"sites\": [");
  const fs::path out = scratch("malformed");
  EXPECT_EQ(invoke("spectrum --config " + cfg.string() + " --out " + out.string()), 2);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, UnknownKeysAndSubcommands) {
  const fs::path cfg = write_config(
      "unknown.json",
      R"({"model": {"sites": [{"id": 0, "twice_s": 1}], "edges": [], "model": {"kind": "XXX"}}, "params": {"bogus": 1}})");
  const fs::path out = scratch("unknown");
  EXPECT_EQ(invoke("spectrum --config " + cfg.string() + " --out " + out.string()), 2);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_EQ(invoke("frobnicate --config " + cfg.string() + " --out " + out.string()), 2);
  EXPECT_EQ(invoke("spectrum --config /nonexistent.json --out " + out.string()), 2);
}

TEST(Cli, CheckFailureExitsOne) {
  const fs::path cfg = write_config("antiferro.json", R"({"model": {"sites": [{"id": 0, "twice_s": 1}, {"id": 1, "twice_s": 1},
    {"id": 2, "twice_s": 1}], "edges": [{"x": 0, "y": 1, "J": -1.0}, {"x": 1, "y": 2, "J": -1.0}],
    "model": {"kind": "XXX"}}})");
  const fs::path out = scratch("antiferro");
  EXPECT_EQ(invoke("foel --config " + cfg.string() + " --out " + out.string()), 1);
  const json rec = json::parse(slurp(out / "run.json"));
  EXPECT_FALSE(rec["summary"]["ordered"].get<bool>());
  EXPECT_EQ(rec["exit_code"], 1);
}

TEST(Cli, XxzIsNotSpinSymmetric) {
  const fs::path cfg = write_config("xxz.json", R"({"model": {"sites": [{"id": 0, "twice_s": 1}, {"id": 1, "twice_s": 1},
    {"id": 2, "twice_s": 1}], "edges": [{"x": 0, "y": 1, "J": 1.0}, {"x": 1, "y": 2, "J": 1.0}],
    "model": {"kind": "XXZ", "delta": 2.0}}})");
  EXPECT_EQ(invoke("foel --config " + cfg.string() + " --out " + scratch("xxz").string()), 2);
}

TEST(Cli, SsepPathGaps) {
  const fs::path out = scratch("ssep");
  EXPECT_EQ(invoke("ssep --config " + config("ssep_path3.json") + " --out " + out.string()), 0);
  std::istringstream rows(slurp(out / "gaps.csv"));
  std::string line;
  std::getline(rows, line);
  EXPECT_EQ(line, "component,n,lambda_n");
  std::vector<double> lam;
  while (std::getline(rows, line)) lam.push_back(std::stod(line.substr(line.rfind(',') + 1)));
  ASSERT_EQ(lam.size(), 2u);
  EXPECT_NEAR(lam[0], 1.0, 1e-12);
  EXPECT_NEAR(lam[1], lam[0], 1e-12);
  const json rec = json::parse(slurp(out / "run.json"));
  EXPECT_TRUE(rec["summary"]["equivalence"].get<bool>());
  EXPECT_TRUE(rec["summary"]["aldous_verdict"].get<bool>());
}

TEST(Cli, DeterministicOutputs) {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  ASSERT_EQ(invoke("spectrum --config " + config("spectrum_xxx_chain3.json") + " --out " + a.string()), 0);
  ASSERT_EQ(invoke("spectrum --config " + config("spectrum_xxx_chain3.json") + " --out " + b.string() + " --threads 3"), 0);
  const std::string sectors = slurp(a / "sectors.csv");
  EXPECT_EQ(std::count(sectors.begin(), sectors.end(), '\n'), 9);
  EXPECT_EQ(sectors.substr(0, sectors.find('\n')), "twice_m,energy");
  for (const char* f : {"spectrum.csv", "hamiltonian.csv", "sectors.csv"}) {
    EXPECT_FALSE(slurp(a / f).empty());
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  EXPECT_EQ(json::parse(slurp(b / "run.json"))["threads"], 3);
}

TEST(Cli, SeedOverride) {
  const fs::path out = scratch("seed");
  ASSERT_EQ(invoke("fcs --config " + config("fcs_aklt.json") + " --out " + out.string() + " --seed 42"), 0);
  const json rec = json::parse(slurp(out / "run.json"));
  EXPECT_EQ(rec["seed"], 42);
  EXPECT_LT(rec["summary"]["omega_edge_term"].get<double>(), 1e-12);
}

TEST(Cli, LiebMattis) {
  const fs::path out = scratch("lm");
  EXPECT_EQ(invoke("lieb-mattis --config " + config("lieb_mattis_chain4.json") + " --out " + out.string()), 0);
}

TEST(RunConfig, GapCertificateInProcess) {
  const json cfg = json::parse(slurp(config("gap_cert_aklt.json")));
  json small = cfg;
  small["params"]["lengths"] = {4, 5};
  const RunRecord rec = run_config("gap-cert", small);
  EXPECT_EQ(rec.output.exit_code, kOk);
  const json certs = json::parse(rec.output.files.at("certificates.json"));
  ASSERT_EQ(certs.size(), 2u);
  EXPECT_NEAR(certs[0]["exact_lambda1"].get<double>(), 0.44895586585936265, 1e-10);
  EXPECT_TRUE(certs[0]["epsilon_mn_truncated"].get<bool>());
}

TEST(RunConfig, SsepRejectsModelBlock) {
  const json cfg = json::parse(R"({"graph": {"vertices": 2, "edges": [{"x": 0, "y": 1}]},
    "model": {"sites": [], "model": {"kind": "XXX"}}})");
  EXPECT_THROW(run_config("ssep", cfg), InputError);
}

TEST(Hash, Fnv1aReferenceValues) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cull);
}

}  // namespace
}  // namespace spinlab::cli
