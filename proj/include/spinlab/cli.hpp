// Copyright 2026 The spinlab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file cli.hpp
 * @brief Subcommand orchestration for the spinlab command-line tool.
 *
 * A config is {"model": {...}, "params": {...}, "seed": N}; the ssep
 * subcommand takes a "graph" block instead of "model". Every subcommand
 * computes its outputs in memory first, so an input error leaves the output
 * directory untouched.
 */

#pragma once

#include "spinlab/climit.hpp"
#include "spinlab/fcs.hpp"
#include "spinlab/gapbound.hpp"
#include "spinlab/linalg.hpp"
#include "spinlab/locality.hpp"
#include "spinlab/spectra.hpp"
#include "spinlab/spinops.hpp"
#include "spinlab/ssep.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace spinlab::cli {

using nlohmann::json;

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kInputError = 2 };

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

/// Output of one subcommand before it touches the filesystem.
struct RunOutput {
  int exit_code = kOk;
  std::map<std::string, std::string> files;  // name -> contents
  json summary = json::object();             // subcommand-specific results
  json tolerances = json::object();
  json residuals = json::object();
};

struct RunRecord {
  std::string subcommand;
  std::string model_hash;
  std::uint64_t seed = 0;
  int threads = 1;
  double wall_time_s = 0.0;
  RunOutput output;

  [[nodiscard]] json to_json() const {
    json manifest = json::array();
    for (const auto& [name, _] : output.files) manifest.push_back(name);
    return {{"subcommand", subcommand},    {"model_hash", model_hash},
            {"seed", seed},                {"threads", threads},
            {"exit_code", output.exit_code}, {"wall_time_s", wall_time_s},
            {"tolerances", output.tolerances}, {"residuals", output.residuals},
            {"summary", output.summary},   {"outputs", manifest}};
  }
};

namespace detail {

inline std::string fmt(double v) { return format_double(v); }

/// Accessor for the "params" block that rejects keys nobody read.
class Params {
 public:
  explicit Params(const json& j, std::string where) : j_(j.is_null() ? json::object() : j), where_(std::move(where)) {
    if (!j_.is_object()) throw InputError("params must be a JSON object");
  }
  template <class T>
  T get(const std::string& key, T fallback) {
    used_.insert(key);
    if (!j_.contains(key)) return fallback;
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw InputError("params." + key + ": " + e.what());
    }
  }
  template <class T>
  T require(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key)) throw InputError("params." + key + " is required for " + where_);
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw InputError("params." + key + ": " + e.what());
    }
  }
  void finish() const {
    for (const auto& [key, _] : j_.items())
      if (!used_.count(key)) throw InputError("unknown key '" + key + "' in params for " + where_);
  }

 private:
  json j_;
  std::string where_;
  std::set<std::string> used_;
};

inline std::vector<bool> partition_from_ids(const SpinGraph& g, const std::vector<int>& ids) {
  std::vector<bool> in_a(static_cast<std::size_t>(g.size()), false);
  for (int id : ids) in_a[static_cast<std::size_t>(g.position_of(id))] = true;
  return in_a;
}

inline void check_chain(const SpinGraph& g) {
  for (std::size_t k = 0; k < g.edges().size(); ++k)
    if (g.edges()[k].x != static_cast<int>(k) || g.edges()[k].y != static_cast<int>(k) + 1)
      throw InputError("this subcommand needs an open chain with edges (i, i+1) in site order");
}

inline std::string levels_csv(const SpinLevelTable& t, const std::vector<LevelMargin>& margins) {
  std::ostringstream os;
  os << "twice_s,energy,multiplets,margin,status\n";
  for (const auto& [ts, lvl] : t.entries) {
    os << ts << ',' << fmt(lvl.energy_min) << ',' << lvl.multiplets.size() << ',';
    bool found = false;
    for (const auto& m : margins)
      if (m.twice_s == ts) {
        os << fmt(m.margin) << ',' << to_string(m.status);
        found = true;
      }
    if (!found) os << ",";
    os << '\n';
  }
  return os.str();
}

inline json margins_json(const std::vector<LevelMargin>& ms) {
  json a = json::array();
  for (const auto& m : ms) a.push_back({{"twice_s", m.twice_s}, {"margin", m.margin}, {"status", to_string(m.status)}});
  return a;
}

// --------------------------------------------------------------------------

inline RunOutput run_spectrum(const ModelDocument& doc, Params& p) {
  std::optional<int> twice_m;
  if (const int tm = p.get<int>("twice_m", std::numeric_limits<int>::min()); tm != std::numeric_limits<int>::min())
    twice_m = tm;
  const bool triplets = p.get<bool>("triplets", false);
  SpectrumOptions opt;
  opt.dense_cap = p.get<Index>("dense_cap", 4096);
  p.finish();
  const SparseHermitian h = build_hamiltonian(doc.graph, doc.model);
  const SpectrumResult sp = eigen_spectrum(h, twice_m, opt);
  RunOutput out;
  std::ostringstream os;
  os << "index,energy\n";
  for (Index i = 0; i < sp.eigenvalues.size(); ++i) os << i << ',' << fmt(sp.eigenvalues(i)) << '\n';
  out.files["spectrum.csv"] = os.str();
  if (!twice_m && sector_leakage(h) <= 1e-12) {
    // (M, E) scatter, one row per eigenvalue
    std::ostringstream ms;
    ms << "twice_m,energy\n";
    for (const auto& sec : magnetization_sectors(h.basis())) {
      const RVec ev = eigen_spectrum(h, sec.twice_m, opt).eigenvalues;
      for (Index i = 0; i < ev.size(); ++i) ms << sec.twice_m << ',' << fmt(ev(i)) << '\n';
    }
    out.files["sectors.csv"] = ms.str();
  }
  if (triplets) {
    std::ostringstream ts;
    write_triplets_csv(ts, h);
    out.files["hamiltonian.csv"] = ts.str();
  }
  out.summary = {{"dim", h.dim()}, {"sector", sp.label()}, {"ground_energy", sp.eigenvalues(0)}};
  out.tolerances = {{"hermiticity", 1e-12}, {"residual_relative", 1e-9}};
  out.residuals = {{"hermiticity", h.hermiticity_residual()}, {"eigenpair", sp.max_residual}};
  return out;
}

inline RunOutput run_foel(const ModelDocument& doc, Params& p) {
  p.finish();
  const SparseHermitian h = build_hamiltonian(doc.graph, doc.model);
  const FoelReport r = foel_check(spin_level_table(h));
  RunOutput out;
  out.files["levels.csv"] = levels_csv(r.table, r.margins);
  out.summary = {{"ordered", r.ordered}, {"inconclusive", r.inconclusive}, {"margins", margins_json(r.margins)}};
  out.tolerances = {{"margin_tie", kMarginTieTol}, {"casimir_rounding", 1e-6}};
  out.residuals = {{"commutator_h_s3", r.table.commutator_h_s3}, {"commutator_h_casimir", r.table.commutator_h_casimir}};
  out.exit_code = r.ordered ? kOk : kCheckFailed;
  return out;
}

inline RunOutput run_lieb_mattis(const ModelDocument& doc, Params& p) {
  const auto ids = p.require<std::vector<int>>("partition_a");
  p.finish();
  if (doc.model.kind != ModelKind::XXX) throw InputError("lieb-mattis needs the XXX model with antiferromagnetic edges");
  const std::vector<bool> in_a = partition_from_ids(doc.graph, ids);
  const SparseHermitian h = lieb_mattis_hamiltonian(doc.graph, in_a);
  const LiebMattisReport r = lieb_mattis_check(doc.graph, in_a, h);
  RunOutput out;
  out.files["levels.csv"] = levels_csv(r.table, r.margins);
  out.summary = {{"twice_target", r.twice_target},
                 {"ground_energy", r.ground_energy},
                 {"ground_at_target", r.ground_at_target},
                 {"ordered", r.ordered},
                 {"margins", margins_json(r.margins)}};
  out.tolerances = {{"margin_tie", kMarginTieTol}};
  out.residuals = {{"commutator_h_casimir", r.table.commutator_h_casimir}};
  out.exit_code = r.ground_at_target && r.ordered ? kOk : kCheckFailed;
  return out;
}

inline ChainModel chain_model(const ModelDocument& doc) {
  if (doc.graph.edges().empty()) throw InputError("gap-cert needs at least one edge");
  const int ts = doc.graph.sites().front().spin.twice_s();
  for (const auto& s : doc.graph.sites())
    if (s.spin.twice_s() != ts) throw InputError("gap-cert needs uniform spins");
  const CMat h = edge_term(doc.graph, doc.model, 0);
  for (std::size_t k = 1; k < doc.graph.edges().size(); ++k)
    if (max_abs(edge_term(doc.graph, doc.model, k) - h) > 1e-14) throw InputError("gap-cert needs a translation-invariant chain");
  return {SpinValue(ts), h};
}

inline RunOutput run_gap_cert(const ModelDocument& doc, Params& p) {
  check_chain(doc.graph);
  const auto lengths = p.get<std::vector<int>>("lengths", {doc.graph.size()});
  const int m = p.get<int>("m", 1), n = p.get<int>("n", 1);
  GapBoundOptions opt;
  opt.svd_cutoff = p.get<double>("svd_cutoff", 1e-8);
  p.finish();
  const ChainModel model = chain_model(doc);
  RunOutput out;
  std::ostringstream csv;
  csv << "L,bound73,bound74,exact_lambda1\n";
  json certs = json::array();
  bool sound = true;
  for (int length : lengths) {
    const GapCertificate c = gap_certificate(model, length, m, n, opt);
    json cj = {{"L", c.length},
               {"gamma2", c.gamma2},
               {"epsilon", c.epsilon.epsilon},
               {"per_n", c.epsilon.per_n},
               {"epsilon_below_threshold", c.epsilon.below_threshold},
               {"bound73", c.bound73 ? json(*c.bound73) : json(nullptr)},
               {"m", c.m},
               {"n", c.n},
               {"epsilon_mn", c.eps_mn.value},
               {"epsilon_mn_per_m", c.eps_mn.per_m},
               {"epsilon_mn_truncated", c.eps_mn.truncated},
               {"lambda1_n_plus_m", c.lambda1_nm},
               {"bound74", c.bound74 ? json(*c.bound74) : json(nullptr)},
               {"exact_lambda1", c.exact_lambda1},
               {"min_lambda1_window", c.min_lambda1_window},
               {"cutoffs", {{"svd_relative", c.svd_cutoff}}}};
    certs.push_back(cj);
    csv << length << ',' << (c.bound73 ? fmt(*c.bound73) : "") << ',' << (c.bound74 ? fmt(*c.bound74) : "") << ','
        << fmt(c.exact_lambda1) << '\n';
    if (c.bound73 && *c.bound73 > c.exact_lambda1 + 1e-9) sound = false;
    if (c.bound74 && *c.bound74 > c.exact_lambda1 + 1e-9) sound = false;
  }
  out.files["certificates.json"] = certs.dump(2) + "\n";
  out.files["bounds.csv"] = csv.str();
  out.summary = {{"sound", sound}, {"lengths", lengths}};
  out.tolerances = {{"soundness", 1e-9}, {"svd_relative", opt.svd_cutoff}};
  out.exit_code = sound ? kOk : kCheckFailed;
  return out;
}

inline RunOutput run_fcs(const ModelDocument* doc, Params& p) {
  const std::string iso = p.get<std::string>("isometry", "aklt");
  const int max_r = p.get<int>("max_r", 8);
  p.finish();
  if (max_r < 1) throw InputError("max_r must be positive");
  IsometryV v = aklt_isometry();
  if (iso != "aklt") {
    std::ifstream is(iso);
    if (!is) throw InputError("cannot open isometry file '" + iso + "'");
    v = read_isometry_csv(is);
  }
  const CpUnitalMap map = make_pure_map(v);
  const FcsTriple triple = FcsTriple::from_map(map);
  const CorrelationLength cl = correlation_length(map);
  const InvariantState inv = invariant_state(map);
  RunOutput out;
  std::ostringstream ts;
  ts << "index,re,im,modulus\n";
  for (std::size_t i = 0; i < cl.spectrum.size(); ++i)
    ts << i << ',' << fmt(cl.spectrum[i].real()) << ',' << fmt(cl.spectrum[i].imag()) << ','
       << fmt(std::abs(cl.spectrum[i])) << '\n';
  out.files["transfer_spectrum.csv"] = ts.str();
  const int n = v.physical_dim();
  const CMat sz = spin_matrices(SpinValue(n - 1)).z;
  const std::vector<cplx> tp = fcs_two_point(triple, sz, sz, max_r);
  std::ostringstream cs;
  cs << "r,correlation,ratio\n";
  for (std::size_t r = 0; r < tp.size(); ++r) {
    cs << r + 1 << ',' << fmt(tp[r].real()) << ',';
    if (r > 0 && tp[r - 1] != cplx{}) cs << fmt((tp[r] / tp[r - 1]).real());
    cs << '\n';
  }
  out.files["two_point.csv"] = cs.str();
  out.summary = {{"physical_dim", n},
                 {"aux_dim", v.aux_dim()},
                 {"subleading_re", cl.spectrum.size() > 1 ? cl.spectrum[1].real() : 0.0},
                 {"correlation_length", cl.xi},
                 {"unique_invariant_state", inv.unique}};
  double omega_h = 0.0;
  if (doc && doc->model.kind == ModelKind::AKLT) {
    omega_h = std::abs(fcs_expectation_local(triple, aklt_bond(), 2));
    out.summary["omega_edge_term"] = omega_h;
  }
  out.tolerances = {{"isometry", 1e-10}, {"edge_term", 1e-12}};
  out.residuals = {{"invariance", inv.residual}, {"unitality", map.unitality_residual()}};
  out.exit_code = omega_h <= 1e-12 ? kOk : kCheckFailed;
  return out;
}

inline RunOutput run_lr(const ModelDocument& doc, Params& p) {
  const int site_b = p.get<int>("site_b", doc.graph.size() / 2);
  const auto times = p.get<std::vector<double>>("times", {0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0});
  const auto lambdas = p.get<std::vector<double>>("lambdas", {0.5, 1.0});
  SupOptions sup;
  sup.grid_points = p.get<int>("grid_points", 64);
  sup.seed = p.get<std::uint64_t>("grid_seed", 0);
  const double threshold = p.get<double>("front_threshold", 0.01);
  p.finish();
  const int b_pos = doc.graph.position_of(site_b);
  const SparseHermitian h = build_hamiltonian(doc.graph, doc.model);
  const SpectralDecomposition sd(h);
  const CMat bz = spin_matrices(doc.graph.sites()[static_cast<std::size_t>(b_pos)].spin).z;
  const CMat b = embed_site_dense(h.basis(), b_pos, bz);
  const double b_norm = operator_norm(bz);
  std::vector<int> xs(static_cast<std::size_t>(doc.graph.size()));
  std::iota(xs.begin(), xs.end(), 0);
  const CommutatorProfile prof = commutator_profile(sd, b, xs, times, sup);
  const Interaction phi = interaction_from_model(doc.graph, doc.model);
  RunOutput out;
  std::ostringstream os;
  os << "lambda,x,t,measured,bound\n";
  bool sound = true;
  json per_lambda = json::array();
  std::vector<double> lambda_totals;
  for (double lam : lambdas) {
    double total = 0.0;
    const double pn = interaction_norm(phi, doc.graph, lam, doc.graph.max_local_dim());
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < xs.size(); ++i)
      for (std::size_t k = 0; k < times.size(); ++k) {
        const double bound = lr_bound(doc.graph, pn, lam, {b_pos}, b_norm, xs[i], times[k]).value;
        const double meas = prof.values[i][k];
        os << fmt(lam) << ',' << doc.graph.sites()[i].id << ',' << fmt(times[k]) << ',' << fmt(meas) << ','
           << fmt(bound) << '\n';
        worst = std::max(worst, meas - bound);
        total += bound;
        if (meas > bound + 1e-9) sound = false;
      }
    lambda_totals.push_back(total);
    per_lambda.push_back({{"lambda", lam}, {"phi_norm", pn}, {"max_measured_minus_bound", worst},
                          {"implied_velocity", 2.0 * pn / lam}});
  }
  out.files["profile.csv"] = os.str();
  const auto front = level_set_front(prof, doc.graph, {b_pos}, threshold);
  std::ostringstream fs;
  fs << "t,front_distance\n";
  for (const auto& f : front) fs << fmt(f.t) << ',' << fmt(f.distance) << '\n';
  out.files["front.csv"] = fs.str();
  out.summary = {{"sound", sound},
                 {"per_lambda", per_lambda},
                 {"front_velocity", times.size() >= 2 ? front_velocity(front) : 0.0},
                 {"grid_points", prof.grid_points},
                 {"final_step", prof.final_step}};
  if (!per_lambda.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < lambda_totals.size(); ++i)
      if (lambda_totals[i] < lambda_totals[best]) best = i;
    out.summary["tightest_lambda"] = lambdas[best];
  }
  out.tolerances = {{"soundness", 1e-9}};
  out.exit_code = sound ? kOk : kCheckFailed;
  return out;
}

inline RunOutput run_cluster(const ModelDocument& doc, Params& p) {
  const int site_a = p.get<int>("site_a", 2);
  const double lambda = p.get<double>("lambda", 1.0);
  const int skip = p.get<int>("boundary_skip", 2);
  p.finish();
  check_chain(doc.graph);
  const int a_pos = doc.graph.position_of(site_a);
  const SparseHermitian h = build_hamiltonian(doc.graph, doc.model);
  const GroundState gs = ground_state(h);
  const CMat sz = spin_matrices(doc.graph.sites()[static_cast<std::size_t>(a_pos)].spin).z;
  const ClusteringCurve cc =
      clustering_measure(doc.graph, h, gs, sz, a_pos, sz, lambda, interaction_from_model(doc.graph, doc.model), skip);
  RunOutput out;
  std::ostringstream os;
  os << "d,truncated_correlation,fit\n";
  for (std::size_t i = 0; i < cc.distances.size(); ++i) {
    const bool in_window = std::find(cc.window.begin(), cc.window.end(), cc.distances[i]) != cc.window.end();
    os << cc.distances[i] << ',' << fmt(cc.correlations[i]) << ',';
    if (in_window) os << fmt(std::exp(cc.fit.intercept + cc.fit.slope * cc.distances[i]));
    os << '\n';
  }
  out.files["correlations.csv"] = os.str();
  out.summary = {{"rate", cc.rate},          {"r2", cc.fit.r2},     {"gap", cc.gap},
                 {"lambda", cc.lambda},      {"phi_norm", cc.phi_norm}, {"mu", cc.mu},
                 {"degenerate", cc.degenerate}, {"ground_twice_s", cc.ground_twice_s},
                 {"rate_at_least_mu", cc.rate >= cc.mu}};
  out.tolerances = {{"degeneracy_relative", 1e-9}};
  out.exit_code = cc.gap > 0.0 && cc.rate >= cc.mu ? kOk : kCheckFailed;
  return out;
}

inline RunOutput run_ssep(const RateGraph& g, Params& p) {
  const auto times = p.get<std::vector<double>>("semigroup_times", {0.1, 1.0, 10.0});
  p.finish();
  const EquivalenceReport eq = heisenberg_equivalence_check(g);
  const AldousScan scan = aldous_scan(g);
  double min_entry = 0.0, row_dev = 0.0;
  for (int n = 0; n <= g.vertices(); ++n)
    for (double t : times) {
      const StochasticityReport s = semigroup_check(ssep_generator(g, n), t);
      min_entry = std::min(min_entry, s.min_entry);
      row_dev = std::max(row_dev, s.max_row_sum_deviation);
    }
  RunOutput out;
  std::ostringstream os;
  os << "component,n,lambda_n\n";
  json comps = json::array();
  for (std::size_t c = 0; c < scan.components.size(); ++c) {
    const auto& cs = scan.components[c];
    for (std::size_t n = 0; n < cs.lambda.size(); ++n) os << c << ',' << n + 1 << ',' << fmt(cs.lambda[n]) << '\n';
    comps.push_back({{"vertices", cs.vertices}, {"verdict", cs.verdict},
                     {"max_relative_deviation", cs.max_relative_deviation}});
  }
  out.files["gaps.csv"] = os.str();
  out.summary = {{"equivalence", eq.equal},
                 {"equivalence_max_deviation", eq.max_deviation},
                 {"hamiltonian_offset", eq.offset},
                 {"coupling_scale", eq.coupling_scale},
                 {"connected", scan.connected},
                 {"aldous_verdict", scan.verdict},
                 {"components", comps},
                 {"semigroup_min_entry", min_entry},
                 {"semigroup_row_sum_deviation", row_dev}};
  if (!scan.connected) out.summary["warning"] = "graph is disconnected; gaps reported per component";
  if (eq.first_mismatch)
    out.summary["first_mismatch"] = {{"n", eq.first_mismatch->particles}, {"row", eq.first_mismatch->row},
                                     {"col", eq.first_mismatch->col}};
  out.tolerances = {{"equivalence", 1e-12}, {"aldous_relative", 1e-8}, {"stochasticity", 1e-10}};
  const bool stochastic = min_entry >= -1e-10 && row_dev <= 1e-10;
  out.exit_code = eq.equal && stochastic ? kOk : kCheckFailed;
  return out;
}

inline RunOutput run_climit(const ModelDocument& doc, Params& p) {
  const auto spins = p.get<std::vector<int>>("twice_spins", {1, 2, 3, 4, 5});
  const auto betas = p.get<std::vector<double>>("betas", {0.5, 1.0, 2.0, 4.0});
  const double c_max = p.get<double>("c_max", 10.0);
  QuadratureSpec q;
  q.rel_tol = p.get<double>("quadrature_tol", 1e-8);
  q.monte_carlo_samples = p.get<int>("monte_carlo_samples", q.monte_carlo_samples);
  p.finish();
  const SandwichReport r = sandwich_check(doc.graph, doc.model, spins, betas, q, c_max);
  RunOutput out;
  std::ostringstream os;
  os << "beta,Z_C,Z_C_error";
  for (int ts : spins) os << ",Z_Q_2S" << ts;
  os << '\n';
  for (const auto& row : r.rows) {
    os << fmt(row.beta) << ',' << fmt(row.z_classical) << ',' << fmt(row.z_classical_error);
    for (double z : row.z_quantum) os << ',' << fmt(z);
    os << '\n';
  }
  out.files["partition.csv"] = os.str();
  std::ostringstream cs;
  cs << "twice_s,fitted_c,free_energy_gap\n";
  json fitted = json::array();
  for (std::size_t s = 0; s < spins.size(); ++s) {
    cs << spins[s] << ',' << (r.fitted_c[s] ? fmt(*r.fitted_c[s]) : "") << ',' << fmt(r.free_energy_gap[s]) << '\n';
    fitted.push_back(r.fitted_c[s] ? json(*r.fitted_c[s]) : json(nullptr));
  }
  out.files["fitted_c.csv"] = cs.str();
  out.summary = {{"lower_holds", r.lower_holds},
                 {"fitted_c", fitted},
                 {"c_max", c_max},
                 {"normalization", "H built from S^i/S; Z_Q divided by (2S+1)^|V|; Z_C over the normalized product measure"},
                 {"quadrature", {{"rule", "Gauss-Legendre in cos(theta) x uniform phi, doubled to agreement"},
                                 {"rel_tol", q.rel_tol}}}};
  out.tolerances = {{"quadrature_relative", q.rel_tol}};
  out.exit_code = r.lower_holds ? kOk : kCheckFailed;
  return out;
}

}  // namespace detail

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"spectrum", "foel",    "lieb-mattis", "gap-cert", "fcs",
                                                 "lr",       "cluster", "ssep",        "climit"};
  return names;
}

/// Runs one subcommand on a parsed config; throws InputError on bad input.
inline RunRecord run_config(const std::string& sub, const json& config, std::optional<std::uint64_t> seed_override = {},
                            int threads = 1) {
  const auto start = std::chrono::steady_clock::now();
  if (std::find(subcommands().begin(), subcommands().end(), sub) == subcommands().end())
    throw InputError("unknown subcommand '" + sub + "'");
  if (!config.is_object()) throw InputError("config must be a JSON object");
  for (const auto& [key, _] : config.items())
    if (key != "model" && key != "params" && key != "seed" && key != "graph")
      throw InputError("unknown top-level key '" + key + "'");
  RunRecord rec;
  rec.subcommand = sub;
  rec.threads = threads;
  try {
    rec.seed = seed_override ? *seed_override : config.value("seed", std::uint64_t{0});
  } catch (const json::exception& e) {
    throw InputError(std::string("seed: ") + e.what());
  }
  detail::Params params(config.contains("params") ? config.at("params") : json(), sub);
  if (sub == "ssep") {
    if (!config.contains("graph")) throw InputError("ssep needs a \"graph\" block");
    if (config.contains("model")) throw InputError("ssep takes a \"graph\" block, not \"model\"");
    rec.model_hash = hex64(fnv1a(config.at("graph").dump()));
    rec.output = detail::run_ssep(parse_rate_graph(config.at("graph")), params);
  } else {
    if (config.contains("graph")) throw InputError("\"graph\" is only valid for ssep");
    std::optional<ModelDocument> doc;
    if (config.contains("model")) {
      doc = parse_model_document(config.at("model"));
      rec.model_hash = hex64(fnv1a(config.at("model").dump()));
    } else if (sub != "fcs") {
      throw InputError(sub + " needs a \"model\" block");
    }
    if (sub == "spectrum") rec.output = detail::run_spectrum(*doc, params);
    else if (sub == "foel") rec.output = detail::run_foel(*doc, params);
    else if (sub == "lieb-mattis") rec.output = detail::run_lieb_mattis(*doc, params);
    else if (sub == "gap-cert") rec.output = detail::run_gap_cert(*doc, params);
    else if (sub == "fcs") rec.output = detail::run_fcs(doc ? &*doc : nullptr, params);
    else if (sub == "lr") rec.output = detail::run_lr(*doc, params);
    else if (sub == "cluster") rec.output = detail::run_cluster(*doc, params);
    else rec.output = detail::run_climit(*doc, params);
  }
  rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

/// Writes every output file plus run.json into `out_dir`.
inline void write_outputs(const RunRecord& rec, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  for (const auto& [name, contents] : rec.output.files) {
    std::ofstream os(out_dir / name, std::ios::binary);
    os << contents;
    if (!os) throw std::runtime_error("failed to write " + (out_dir / name).string());
  }
  std::ofstream rs(out_dir / "run.json", std::ios::binary);
  rs << rec.to_json().dump(2) << '\n';
}

/// Full command: parse the config file, run, write. Returns the exit code.
inline int run(const std::string& sub, const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
               std::optional<std::uint64_t> seed = {}, int threads = 1, std::ostream& err = std::cerr) {
  RunRecord rec;
  try {
    std::ifstream is(config_path);
    if (!is) throw InputError("cannot open config '" + config_path.string() + "'");
    json config;
    try {
      config = json::parse(is);
    } catch (const json::exception& e) {
      throw InputError(std::string("malformed config: ") + e.what());
    }
    rec = run_config(sub, config, seed, threads);
  } catch (const InputError& e) {
    err << "spinlab: input error: " << e.what() << '\n';
    return kInputError;
  } catch (const NumericalError& e) {
    err << "spinlab: numerical failure: " << e.what() << '\n';
    return kCheckFailed;
  }
  write_outputs(rec, out_dir);
  if (rec.output.exit_code != kOk) err << "spinlab: " << sub << ": check failed\n";
  return rec.output.exit_code;
}

}  // namespace spinlab::cli
