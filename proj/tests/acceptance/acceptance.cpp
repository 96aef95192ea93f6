// Acceptance runner: one PASS/FAIL line per criterion.
//
//   acceptance [--only N]... [--seed S] [--workers W] [--instances K]
//
// Exits 0 iff every selected criterion passed.

#include <algorithm>
#include <iostream>

#include <CLI11.hpp>

#include "qbsde/selftest.hpp"

int main(int argc, char** argv) {
  qbsde::selftest::Options o;
  CLI::App app{"qbsde acceptance criteria"};
  app.add_option("--only", o.only, "criterion ids (1..8); repeatable")->check(CLI::Range(1, 8));
  app.add_option("--seed", o.seed, "top-level seed");
  app.add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--instances", o.instances, "randomized instances per property suite")
      ->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  bool all = true;
  for (int id = 1; id <= 8; ++id) {
    if (!o.only.empty() && std::find(o.only.begin(), o.only.end(), id) == o.only.end()) continue;
    const auto r = qbsde::selftest::run_criterion(id, o);
    std::cout << qbsde::selftest::format_line(r) << std::endl;
    all = all && r.pass;
  }
  return all ? 0 : 1;
}
