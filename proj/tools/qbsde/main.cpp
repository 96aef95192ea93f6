// Copyright 2026 The qbsde Authors
// SPDX-License-Identifier: Apache-2.0
//
// qbsde <command> [--config PATH] [--seed N] [--out DIR] [--workers N] [--tol X]

#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "qbsde/errors.hpp"
#include "qbsde/interval.hpp"

namespace {

using namespace qbsde;
using namespace qbsde::cli;

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::config:
    case ErrorKind::validation:
      return kConfig;
    case ErrorKind::domain:
    case ErrorKind::not_locally_integrable:
    case ErrorKind::unsupported:
    case ErrorKind::inapplicable:
    case ErrorKind::precondition:
      return kPrecondition;
    case ErrorKind::range:
    case ErrorKind::simulation:
    case ErrorKind::regression:
    case ErrorKind::resolution:
    case ErrorKind::numerical:
      return kNumerical;
  }
  return kNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quadratic BSDEs with y-dependent generators f(y)|z|^2: transform, classify, solve, "
               "compare, converse, pde, selftest."};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<unsigned> workers;
  std::optional<double> tol;
  bool dump_paths = false;
  app.add_option("--config", config_path, "INI run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "top-level seed; every random stream derives from it");
  app.add_option("--out", out, "output directory");
  app.add_option("--workers", workers, "worker threads (results do not depend on it)")->check(CLI::PositiveNumber);
  app.add_option("--tol", tol, "transform tolerance override")->check(CLI::PositiveNumber);
  app.add_flag("--dump-paths", dump_paths, "write the simulated forward paths as CSV");

  using Cmd = int (*)(Config&, const RunOptions&);
  const std::map<std::string, std::pair<Cmd, const char*>> commands = {
      {"transform", {cmd_transform, "build u_f and write its table, range and invariant report"}},
      {"classify", {cmd_classify, "which solution spaces the declared hypotheses guarantee"}},
      {"solve", {cmd_solve, "solve the BSDE by exact-law quadrature or regression Monte Carlo"}},
      {"compare", {cmd_compare, "comparison check of two problems on shared paths"}},
      {"converse", {cmd_converse, "stopped-path experiment for the converse comparison bound"}},
      {"pde", {cmd_pde, "Feynman-Kac surface, finite-difference oracle, residual and plots"}},
      {"selftest", {cmd_selftest, "run the acceptance criteria and property suites"}},
  };
  for (const auto& [name, c] : commands) app.add_subcommand(name, c.second);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfig;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    Config cfg = config_path.empty() ? Config() : Config::load(config_path);
    if (seed) cfg.set("run.seed", std::to_string(*seed));
    if (out) cfg.set("run.out", *out);
    if (workers) cfg.set("run.workers", std::to_string(*workers));
    if (tol) cfg.set("run.tol", format_double(*tol));
    if (dump_paths) cfg.set("run.dump_paths", "true");
    if (cfg.has("run.tol")) cfg.num("run.tol");
    const RunOptions run = read_run_options(cfg, std::cout);
    return commands.at(name).first(cfg, run);
  } catch (const Error& e) {
    std::cerr << "qbsde " << name << ": " << to_string(e.kind()) << " error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "qbsde " << name << ": " << e.what() << '\n';
    return kNumerical;
  }
}
