// Copyright 2026 The spinlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "spinlab/cli.hpp"

#include <CLI11.hpp>

int main(int argc, char** argv) {
  CLI::App app{"spinlab: exact-diagonalization experiments on quantum spin systems"};
  app.require_subcommand(1);
  std::string config, out;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  for (const auto& name : spinlab::cli::subcommands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "JSON config")->required();
    sub->add_option("--out", out, "output directory")->required();
    sub->add_option("--seed", seed, "overrides the config seed");
    sub->add_option("--threads", threads, "recorded in the run record")->check(CLI::PositiveNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : spinlab::cli::kInputError;
  }
  return spinlab::cli::run(app.get_subcommands().front()->get_name(), config, out, seed, threads);
}
