// Copyright 2026 The qbsde Authors
// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qbsde/bsde.hpp"
#include "qbsde/classifier.hpp"
#include "qbsde/comparison.hpp"
#include "qbsde/errors.hpp"
#include "qbsde/expr.hpp"
#include "qbsde/pde.hpp"
#include "qbsde/selftest.hpp"
#include "svg.hpp"

namespace qbsde::cli {

namespace fs = std::filesystem;

namespace {

// Re-throws configuration-class errors raised while interpreting `key` with
// the key's file position in front.
template <class F>
auto at_key(const Config& cfg, const std::string& key, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError& e) {
    throw ConfigError(cfg.where(key) + ": " + key + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(cfg.where(key) + ": " + key + ": " + e.what());
  }
}

std::vector<double> num_list(Config& cfg, const std::string& key, const std::string& def) {
  const std::string text = cfg.str(key, def);
  std::istringstream is(text);
  std::vector<double> out;
  for (std::string tok; is >> tok;) out.push_back(at_key(cfg, key, [&] {
         try {
           return parse_double(tok);
         } catch (const std::exception&) {
           throw ConfigError("expects a list of numbers, got '" + tok + "'");
         }
       }));
  return out;
}

std::size_t count(Config& cfg, const std::string& key, long def, long min = 0) {
  const long v = cfg.integer(key, def);
  if (v < min) throw ConfigError(cfg.where(key) + ": '" + key + "' must be >= " + std::to_string(min));
  return static_cast<std::size_t>(v);
}

std::optional<bool> maybe_flag(Config& cfg, const std::string& key) {
  if (!cfg.has(key)) return std::nullopt;
  return cfg.flag(key, false);
}

class Output {
 public:
  explicit Output(const RunOptions& run) : run_(run) {
    std::error_code ec;
    fs::create_directories(run.out, ec);
    if (ec) throw ConfigError("cannot create output directory " + run.out.string() + ": " + ec.message());
  }

  std::ofstream open(const std::string& name) {
    const fs::path p = run_.out / name;
    std::ofstream os(p);
    if (!os) throw ConfigError("cannot write " + p.string());
    written_.push_back(p.string());
    return os;
  }

  void manifest(const Config& cfg) {
    auto os = open("manifest.ini");
    cfg.write_manifest(os);
  }

  void list(std::ostream& log) const {
    for (const auto& p : written_) log << "wrote " << p << '\n';
  }

 private:
  const RunOptions& run_;
  std::vector<std::string> written_;
};

// ---- shared config sections -------------------------------------------------

Generator make_generator(Config& cfg, const std::string& sec) {
  const std::string key = sec + ".spec";
  const std::string spec = cfg.str(key);
  Generator g;
  if (spec.rfind("expr ", 0) == 0) {
    const double lo = cfg.num(sec + ".domain_lo", -kInf), hi = cfg.num(sec + ".domain_hi", kInf);
    g = at_key(cfg, key, [&] { return expression_generator(spec.substr(5), OpenInterval(lo, hi)); });
    g.sign_class = at_key(cfg, sec + ".sign", [&] { return parse_sign_class(cfg.str(sec + ".sign", "mixed")); });
    g.lower_bound = cfg.maybe_num(sec + ".lower_bound");
    g.upper_bound = cfg.maybe_num(sec + ".upper_bound");
  } else {
    g = at_key(cfg, key, [&] { return parse_builtin(spec); });
    auto lo = cfg.maybe_num(sec + ".restrict_lo"), hi = cfg.maybe_num(sec + ".restrict_hi");
    if (lo || hi) {
      const OpenInterval sub(lo.value_or(g.domain.lo()), hi.value_or(g.domain.hi()));
      g = at_key(cfg, sec + ".restrict_lo", [&] { return restrict_domain(g, sub); });
    }
  }
  at_key(cfg, key, [&] { g.validate(); });
  return g;
}

Transform make_transform(Config& cfg, const std::string& sec, const Generator& gen) {
  if (auto table = cfg.maybe_str(sec + ".table")) {
    std::ifstream in(*table);
    if (!in) throw ConfigError(cfg.where(sec + ".table") + ": cannot open transform table " + *table);
    return at_key(cfg, sec + ".table", [&] { return Transform::read_csv(in); });
  }
  TransformOptions o;
  const double alpha = cfg.num(sec + ".alpha", default_base_point(gen.domain));
  if (cfg.has("run.tol")) {
    o.tol = cfg.num("run.tol");
    cfg.maybe_str(sec + ".tol");  // superseded by --tol
  } else {
    o.tol = cfg.num(sec + ".tol", o.tol);
  }
  o.grid_nodes = static_cast<int>(count(cfg, sec + ".grid_nodes", o.grid_nodes, 16));
  o.divergence_cap = cfg.num(sec + ".divergence_cap", o.divergence_cap);
  o.use_closed_form = cfg.flag(sec + ".closed_form", o.use_closed_form);
  return build_transform(gen, alpha, o);
}

struct ForwardSpec {
  ForwardModel model;
  double T = 1.0, t0 = 0.0, x0 = 0.0;
};

ForwardSpec make_forward(Config& cfg) {
  ForwardSpec f;
  const std::string name = cfg.str("forward.model", "brownian");
  if (name == "brownian") {
    f.model = ForwardModel::brownian();
  } else if (name == "scaled_brownian" || name == "geometric_brownian") {
    const double mu = cfg.num("forward.mu", 0.0), sigma = cfg.num("forward.sigma", 1.0);
    f.model = at_key(cfg, "forward.sigma", [&] {
      return name == "scaled_brownian" ? ForwardModel::scaled_brownian(mu, sigma)
                                       : ForwardModel::geometric_brownian(mu, sigma);
    });
  } else if (name == "custom") {
    auto b = at_key(cfg, "forward.drift",
                    [&] { return Expression::parse(cfg.str("forward.drift", "0"), {"t", "x"}); });
    auto s = at_key(cfg, "forward.diffusion",
                    [&] { return Expression::parse(cfg.str("forward.diffusion", "1"), {"t", "x"}); });
    f.model.name = "custom";
    f.model.drift = [b](double t, double x) { return b(t, x); };
    f.model.diffusion = [s](double t, double x) { return s(t, x); };
    f.model.lipschitz_declared = cfg.flag("forward.lipschitz", false);
  } else {
    throw ConfigError(cfg.where("forward.model") + ": unknown forward model '" + name +
                      "' (brownian, scaled_brownian, geometric_brownian, custom)");
  }
  f.T = cfg.num("forward.T", 1.0);
  f.t0 = cfg.num("forward.t0", 0.0);
  f.x0 = cfg.num("forward.x0", name == "geometric_brownian" ? 1.0 : 0.0);
  if (!(f.t0 < f.T)) throw ConfigError(cfg.where("forward.T") + ": need t0 < T");
  return f;
}

TerminalMap make_terminal(Config& cfg, const std::string& sec) {
  const std::string key = sec + ".map";
  const std::string spec = cfg.str(key);
  return at_key(cfg, key, [&] { return parse_terminal(spec); });
}

Engine parse_engine(Config& cfg, const std::string& key) {
  const std::string e = cfg.str(key, "quadrature");
  if (e == "quadrature") return Engine::quadrature;
  if (e == "regression") return Engine::regression;
  throw ConfigError(cfg.where(key) + ": unknown engine '" + e + "' (quadrature, regression)");
}

ExactLaw parse_law(Config& cfg, const std::string& key, const ForwardModel& fwd) {
  const std::string def = fwd.law ? to_string(*fwd.law) : "brownian";
  return at_key(cfg, key, [&] { return parse_exact_law(cfg.str(key, def)); });
}

void write_text(Output& out, const std::string& name, const std::string& text, std::ostream& log) {
  auto os = out.open(name);
  os << text;
  log << text;
}

}  // namespace

RunOptions read_run_options(Config& cfg, std::ostream& log) {
  RunOptions r;
  const long seed = cfg.integer("run.seed", static_cast<long>(r.seed));
  if (seed < 0) throw ConfigError(cfg.where("run.seed") + ": seed must be nonnegative");
  r.seed = static_cast<std::uint64_t>(seed);
  r.workers = static_cast<unsigned>(count(cfg, "run.workers", 1, 1));
  r.out = cfg.str("run.out", r.out.string());
  r.dump_paths = cfg.flag("run.dump_paths", false);
  r.log = &log;
  return r;
}

// ---- transform ----------------------------------------------------------------

int cmd_transform(Config& cfg, const RunOptions& run) {
  auto& log = *run.log;
  const Generator gen = make_generator(cfg, "generator");
  const std::vector<double> points = num_list(cfg, "transform.points", "");
  const int invariant_points = static_cast<int>(count(cfg, "transform.invariant_points", 257, 3));
  const Transform t = make_transform(cfg, "transform", gen);
  cfg.reject_unknown();
  Output out(run);
  out.manifest(cfg);

  {
    auto os = out.open("transform_table.csv");
    t.write_csv(os);
  }
  if (!points.empty()) {
    auto os = out.open("transform_points.csv");
    os << "x,u,uprime\n";
    for (double x : points) {
      if (!t.domain().contains(x))
        throw DomainError("transform.points: " + format_double(x) + " is outside D = " + to_string(t.domain()));
      os << format_double(x) << ',' << format_double(t.u(x)) << ',' << format_double(t.u_prime(x)) << '\n';
    }
  }

  const InvariantReport inv = check_invariants(t, invariant_points);
  std::ostringstream rep;
  const auto& V = t.range();
  rep << "generator = " << gen.name << '\n'
      << "representation = " << to_string(t.representation()) << '\n'
      << "alpha = " << format_double(t.base_point()) << '\n'
      << "D = " << to_string(t.domain()) << '\n'
      << "V = " << to_string(V) << '\n'
      << "V_lower = " << (V.lower_finite() ? "bounded" : "unbounded") << '\n'
      << "V_upper = " << (V.upper_finite() ? "bounded" : "unbounded") << '\n'
      << "tol = " << format_double(t.tol()) << '\n'
      << "monotone = " << (inv.monotone ? "true" : "false") << '\n'
      << "max_roundtrip_error = " << format_double(inv.max_roundtrip_error) << '\n'
      << "max_ode_residual = " << format_double(inv.max_ode_residual) << '\n'
      << "max_affine_error = " << format_double(inv.max_affine_error) << '\n'
      << "invariants = " << (inv.ok ? "PASS" : "FAIL") << '\n';
  if (gen.lower_bound.value_or(0.0) > 0 || gen.upper_bound.value_or(0.0) < 0) {
    const ClosedInterval w = sample_window(t.domain(), t.base_point());
    bool ok = true;
    for (int i = 0; i <= 64; ++i) ok = ok && t.exp_bound_check(w.lo + (w.hi - w.lo) * i / 64);
    rep << "exponential_bound = " << (ok ? "PASS" : "FAIL") << '\n';
  }
  write_text(out, "transform_report.txt", rep.str(), log);
  out.list(log);
  return inv.ok ? kOk : kNumerical;
}

// ---- classify -----------------------------------------------------------------

int cmd_classify(Config& cfg, const RunOptions& run) {
  auto& log = *run.log;
  const Generator gen = make_generator(cfg, "generator");
  TerminalMeta meta;
  {
    auto lo = cfg.maybe_num("classify.range_lo"), hi = cfg.maybe_num("classify.range_hi");
    if (lo.has_value() != hi.has_value())
      throw ConfigError(cfg.where(lo ? "classify.range_lo" : "classify.range_hi") +
                        ": range_lo and range_hi go together");
    if (lo) {
      if (!(*lo <= *hi)) throw ConfigError(cfg.where("classify.range_hi") + ": range_lo > range_hi");
      meta.range_subset = ClosedInterval{*lo, *hi};
    }
  }
  meta.lower_bound_const = cfg.maybe_num("classify.lower_bound");
  meta.xi_in_L1 = maybe_flag(cfg, "classify.xi_in_L1");
  meta.xi_in_Lp = cfg.maybe_num("classify.xi_in_Lp");
  meta.xi_minus_in_Lp = cfg.maybe_num("classify.xi_minus_in_Lp");
  meta.xi_plus_in_Lp = cfg.maybe_num("classify.xi_plus_in_Lp");
  meta.uf_xi_in_L1 = maybe_flag(cfg, "classify.uf_xi_in_L1");
  meta.uf_xi_in_Lp = cfg.maybe_num("classify.uf_xi_in_Lp");
  meta.uf_xi_in_Linf = cfg.flag("classify.uf_xi_in_Linf", false);
  const bool use_range = cfg.flag("classify.use_range", true);
  const std::size_t tail_samples = count(cfg, "classify.tail_samples", 0);

  std::optional<Transform> t;
  if (use_range || tail_samples > 0) t = make_transform(cfg, "transform", gen);
  std::optional<ForwardSpec> fwd;
  std::optional<TerminalMap> g;
  std::size_t tail_steps = 0;
  if (tail_samples > 0) {
    fwd = make_forward(cfg);
    g = make_terminal(cfg, "terminal");
    tail_steps = count(cfg, "classify.tail_steps", 50, 1);
  }
  cfg.reject_unknown();
  Output out(run);
  out.manifest(cfg);

  std::optional<OpenInterval> V;
  if (use_range) V = t->range();
  const SpaceReport rep = classify(gen, meta, gen.domain.bounded(), V);
  {
    auto os = out.open("classification.csv");
    os << rep.to_csv();
  }
  std::ostringstream text;
  text << rep.to_text();
  if (tail_samples > 0) {
    const PathBundle b =
        simulate(fwd->model, fwd->t0, fwd->x0, fwd->T, tail_steps, tail_samples, run.seed, run.workers);
    std::vector<double> xi = b.column(b.steps());
    for (double& x : xi) x = (*g)(x);
    try {
      const TailDiagnostic d = check_necessary_condition(*t, xi);
      text << "tail_diagnostic = " << to_string(d.verdict) << " (mean " << format_double(d.mean)
           << ", tail_index " << format_double(d.tail_index) << ", tail_count " << d.tail_count << ")\n";
    } catch (const InapplicableError& e) {
      text << "tail_diagnostic = inapplicable (" << e.what() << ")\n";
    }
  }
  write_text(out, "classification.txt", text.str(), log);
  out.list(log);
  return kOk;
}

// ---- solve --------------------------------------------------------------------

int cmd_solve(Config& cfg, const RunOptions& run) {
  auto& log = *run.log;
  BsdeProblem p;
  p.generator = make_generator(cfg, "generator");
  p.transform = make_transform(cfg, "transform", p.generator);
  p.terminal = make_terminal(cfg, "terminal");
  const ForwardSpec f = make_forward(cfg);
  p.forward = f.model;
  p.T = f.T;
  p.t0 = f.t0;
  p.x0 = f.x0;

  const Engine engine = parse_engine(cfg, "solve.engine");
  const std::size_t paths = count(cfg, "solve.paths", 10000, engine == Engine::regression ? 1 : 0);
  const std::size_t steps = count(cfg, "solve.steps", 20, 1);
  QuadratureOptions q;
  RegressionOptions r;
  ExactLaw law = ExactLaw::brownian;
  if (engine == Engine::quadrature) {
    law = parse_law(cfg, "solve.law", p.forward);
    q.nodes = static_cast<int>(count(cfg, "solve.gh_nodes", 64, 2));
    q.workers = run.workers;
    const std::size_t nt = count(cfg, "solve.surface_times", 0);
    if (nt > 0) {
      const std::size_t nx = count(cfg, "solve.surface_x_n", 41, 1);
      const double lo = cfg.num("solve.surface_x_lo", p.x0 - 2), hi = cfg.num("solve.surface_x_hi", p.x0 + 2);
      for (std::size_t i = 0; i < nt; ++i) q.times.push_back(p.t0 + (p.T - p.t0) * i / nt);
      for (std::size_t j = 0; j < nx; ++j) q.xs.push_back(nx == 1 ? lo : lo + (hi - lo) * j / (nx - 1));
    }
  } else {
    r.degree = static_cast<int>(count(cfg, "solve.degree", 4, 0));
    r.hull_clamp = cfg.flag("solve.hull_clamp", true);
    r.workers = run.workers;
  }
  const bool write_paths = cfg.flag("solve.write_paths", false);
  const std::vector<double> t_check = num_list(cfg, "solve.martingale_times", "0.25 0.5 0.75");
  cfg.reject_unknown();
  Output out(run);
  out.manifest(cfg);

  check_terminal_domain(p);
  std::shared_ptr<const PathBundle> bundle;
  if (paths > 0)
    bundle = std::make_shared<const PathBundle>(
        simulate(p.forward, p.t0, p.x0, p.T, steps, paths, run.seed, run.workers));
  if (bundle && run.dump_paths) {
    auto os = out.open("paths.csv");
    write_paths_csv(os, *bundle);
  }
  const BsdeSolution sol =
      engine == Engine::quadrature ? solve_quadrature(p, law, q, bundle) : solve_regression(p, bundle, r);

  std::ostringstream sum;
  write_summary(sum, sol);
  if (sol.bundle) {
    const ResidualStats rs = residual_check(sol, p);
    sum << "residual_mean = " << format_double(rs.mean) << '\n'
        << "residual_se = " << format_double(rs.se) << '\n'
        << "residual_mean_abs = " << format_double(rs.mean_abs) << '\n';
    const IntegrandMoment im = integrand_moment(sol, p);
    sum << "integrand_moment = " << format_double(im.mean) << " (se " << format_double(im.se)
        << "; proxy for the martingale hypothesis, not a proof)\n";
    std::vector<double> abs_t;
    for (double t : t_check) abs_t.push_back(p.t0 + t * (p.T - p.t0));
    for (const auto& m : martingale_diagnostic(sol, p, abs_t))
      sum << "martingale[" << format_double(m.t) << "] = " << format_double(m.mean) << " vs "
          << format_double(m.reference) << " (se " << format_double(m.se) << ") " << (m.ok ? "ok" : "FLAG")
          << '\n';
  }
  write_text(out, "summary.txt", sum.str(), log);
  {
    auto os = out.open("surface.csv");
    write_surface_csv(os, sol);
  }
  if (write_paths && sol.bundle) {
    auto os = out.open("solution_paths.csv");
    write_solution_paths_csv(os, sol);
  }
  out.list(log);
  return kOk;
}

// ---- compare ------------------------------------------------------------------

int cmd_compare(Config& cfg, const RunOptions& run) {
  auto& log = *run.log;
  ComparisonCase c;
  const ForwardSpec f = make_forward(cfg);
  for (int k : {1, 2}) {
    const std::string s = std::to_string(k);
    BsdeProblem& p = k == 1 ? c.p1 : c.p2;
    p.generator = make_generator(cfg, "generator" + s);
    p.transform = make_transform(cfg, "transform" + s, p.generator);
    p.terminal = make_terminal(cfg, "terminal" + s);
    p.forward = f.model;
    p.T = f.T;
    p.t0 = f.t0;
    p.x0 = f.x0;
  }
  const std::string cond = cfg.str("compare.condition", "a1");
  if (cond == "a1")
    c.condition = ComparisonCondition::a1;
  else if (cond == "a2")
    c.condition = ComparisonCondition::a2;
  else
    throw ConfigError(cfg.where("compare.condition") + ": condition must be a1 or a2, got '" + cond + "'");
  if (c.condition == ComparisonCondition::a1) c.zeta = cfg.num("compare.zeta");
  c.expected_gap = cfg.maybe_num("compare.expected_gap");
  {
    // Default evidence grid: the overlap of both sampling windows.
    const auto w1 = sample_window(c.p1.transform.domain(), c.p1.transform.base_point());
    const auto w2 = sample_window(c.p2.transform.domain(), c.p2.transform.base_point());
    const double lo = cfg.num("compare.grid_lo", std::max(w1.lo, w2.lo));
    const double hi = cfg.num("compare.grid_hi", std::min(w1.hi, w2.hi));
    const std::size_t n = count(cfg, "compare.grid_n", 201, 1);
    for (std::size_t i = 0; i < n; ++i) c.f_grid.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
  }
  c.engine = parse_engine(cfg, "compare.engine");
  if (c.engine == Engine::quadrature) {
    c.law = parse_law(cfg, "compare.law", f.model);
    c.gh_nodes = static_cast<int>(count(cfg, "compare.gh_nodes", 64, 2));
  } else {
    c.degree = static_cast<int>(count(cfg, "compare.degree", 4, 0));
  }
  c.n_paths = count(cfg, "compare.paths", 10000, 1);
  c.steps = count(cfg, "compare.steps", 20, 1);
  c.seed = run.seed;
  c.workers = run.workers;
  cfg.reject_unknown();
  Output out(run);
  out.manifest(cfg);

  const ComparisonReport r = compare(c);
  std::ostringstream text;
  text << "condition = " << to_string(c.condition) << '\n' << r.to_text();
  write_text(out, "comparison.txt", text.str(), log);
  {
    auto os = out.open("comparison_gaps.csv");
    os << "path,max_gap\n";
    for (std::size_t i = 0; i < r.path_gap.size(); ++i) os << i << ',' << format_double(r.path_gap[i]) << '\n';
  }
  if (run.dump_paths && r.bundle) {
    auto os = out.open("paths.csv");
    write_paths_csv(os, *r.bundle);
  }
  out.list(log);
  return r.pass && (!r.strict_checked || r.strict_ok) ? kOk : kTheoremViolation;
}

// ---- converse -----------------------------------------------------------------

int cmd_converse(Config& cfg, const RunOptions& run) {
  auto& log = *run.log;
  const Generator f1 = make_generator(cfg, "generator1");
  const Generator f2 = make_generator(cfg, "generator2");
  const double y = cfg.num("converse.y");
  const double z = cfg.num("converse.z");
  const double K = cfg.num("converse.K");
  const long n = cfg.integer("converse.n", 1);
  ConverseParams prm;
  prm.T = cfg.num("converse.T", prm.T);
  prm.steps = count(cfg, "converse.steps", static_cast<long>(prm.steps), 1);
  prm.n_paths = count(cfg, "converse.paths", static_cast<long>(prm.n_paths), 1);
  prm.check_points = static_cast<int>(count(cfg, "converse.check_points", prm.check_points, 2));
  prm.seed = run.seed;
  prm.workers = run.workers;
  cfg.reject_unknown();
  Output out(run);
  out.manifest(cfg);

  const ConverseReport r = converse_experiment(f1, f2, y, z, K, static_cast<int>(n), prm);
  write_text(out, "converse.txt", r.to_text(), log);
  {
    auto os = out.open("converse.csv");
    write_converse_csv(os, r);
  }
  out.list(log);
  return r.verdict == ConverseVerdict::contradiction_found ? kOk : kTheoremViolation;
}

// ---- pde ----------------------------------------------------------------------

int cmd_pde(Config& cfg, const RunOptions& run) {
  auto& log = *run.log;
  PdeProblem p;
  p.generator = make_generator(cfg, "generator");
  p.transform = make_transform(cfg, "transform", p.generator);
  p.terminal = make_terminal(cfg, "terminal");
  const ForwardSpec f = make_forward(cfg);
  if (f.t0 != 0.0) throw ConfigError(cfg.where("forward.t0") + ": the pde grid starts at t = 0");
  p.forward = f.model;
  p.T = f.T;
  p.x_min = cfg.num("pde.x_min", p.x_min);
  p.x_max = cfg.num("pde.x_max", p.x_max);
  if (!(p.x_min < p.x_max)) throw ConfigError(cfg.where("pde.x_max") + ": need x_min < x_max");
  p.n_t = static_cast<int>(count(cfg, "pde.n_t", p.n_t, 4));
  p.n_x = static_cast<int>(count(cfg, "pde.n_x", p.n_x, 5));
  p.assumptions.f_continuous_nonnegative = cfg.flag("pde.f_continuous_nonnegative", false);
  p.assumptions.terminal_polynomial_growth = cfg.flag("pde.terminal_polynomial_growth", false);
  p.assumptions.coefficients_lipschitz = cfg.flag("pde.coefficients_lipschitz", false);
  p.assumptions.allow_nonpositive = cfg.flag("pde.allow_nonpositive", false);

  const std::string method = cfg.str("pde.method", "both");
  if (method != "both" && method != "fk" && method != "fd")
    throw ConfigError(cfg.where("pde.method") + ": method must be fk, fd or both");
  FkParams fk;
  if (method != "fd") {
    fk.engine = parse_engine(cfg, "pde.fk_engine");
    if (fk.engine == Engine::quadrature) {
      fk.gh_nodes = static_cast<int>(count(cfg, "pde.gh_nodes", 64, 2));
    } else {
      fk.mc_paths = count(cfg, "pde.mc_paths", static_cast<long>(fk.mc_paths), 2);
      fk.mc_steps = count(cfg, "pde.mc_steps", static_cast<long>(fk.mc_steps), 1);
    }
    fk.seed = run.seed;
    fk.workers = run.workers;
  }
  const double third = (p.x_max - p.x_min) / 3;
  Subgrid sub{cfg.num("pde.residual_t_lo", 0.1 * p.T), cfg.num("pde.residual_t_hi", 0.9 * p.T),
              cfg.num("pde.residual_x_lo", p.x_min + third), cfg.num("pde.residual_x_hi", p.x_max - third)};
  const bool sensitivity = cfg.flag("pde.window_sensitivity", true);
  cfg.reject_unknown();
  Output out(run);
  out.manifest(cfg);

  validate(p);
  std::optional<ValueSurface> sfk, sfd;
  if (method != "fd") sfk = solve_feynman_kac(p, fk);
  if (method != "fk") sfd = solve_fd_oracle(p);
  // The residual study uses the smooth FD surface when there is one; a
  // Monte Carlo surface is too noisy to difference twice.
  const ValueSurface& primary = sfd ? *sfd : *sfk;
  const ResidualGrid res = pde_residual(primary, p, sub);

  std::ostringstream sum;
  auto v0 = [&](const ValueSurface& s) { return s.v_interp(0, f.x0); };
  sum << "x0 = " << format_double(f.x0) << '\n';
  for (const ValueSurface* s : {sfk ? &*sfk : nullptr, sfd ? &*sfd : nullptr}) {
    if (!s) continue;
    sum << s->method << ".v0 = " << format_double(v0(*s)) << '\n';
    if (s->max_se > 0) sum << s->method << ".max_se = " << format_double(s->max_se) << '\n';
    for (const auto& n : s->notes) sum << s->method << ".note = " << n << '\n';
  }
  if (sfk && sfd) {
    double gap = 0.0;
    for (std::size_t i = 0; i < sfk->times.size(); ++i)
      for (std::size_t j = 0; j < sfk->nx(); ++j)
        if (sfk->xs[j] >= sub.x_lo && sfk->xs[j] <= sub.x_hi)
          gap = std::max(gap, std::abs(sfk->v_at(i, j) - sfd->v_at(i, j)));
    sum << "max_fk_fd_gap_on_residual_window = " << format_double(gap) << '\n';
  }
  sum << "residual_surface = " << primary.method << '\n'
      << "residual_max_abs = " << format_double(res.max_abs) << '\n'
      << "residual_rms = " << format_double(res.rms) << '\n';
  if (sensitivity)
    sum << "window_sensitivity_at_x0 = " << format_double(window_sensitivity(p, 0.0, f.x0)) << '\n';
  write_text(out, "pde_summary.txt", sum.str(), log);

  if (sfk) {
    auto os = out.open("pde_fk.csv");
    write_surface_csv(os, *sfk, sfd ? nullptr : &res);
  }
  if (sfd) {
    auto os = out.open("pde_fd.csv");
    write_surface_csv(os, *sfd, &res);
  }
  {
    std::vector<svg::Series> series;
    for (const ValueSurface* s : {sfk ? &*sfk : nullptr, sfd ? &*sfd : nullptr}) {
      if (!s) continue;
      svg::Series line{s->method, s->xs, {}};
      for (std::size_t j = 0; j < s->nx(); ++j) line.y.push_back(s->v_at(0, j));
      series.push_back(std::move(line));
    }
    auto os = out.open("pde_v_t0.svg");
    svg::line_plot(os, "v(0, x)", "x", "v", series);
  }
  {
    std::vector<double> ts, xs;
    for (auto i : res.rows) ts.push_back(primary.times[i]);
    for (auto j : res.cols) xs.push_back(primary.xs[j]);
    auto os = out.open("pde_residual.svg");
    svg::heatmap(os, "PDE residual (" + primary.method + ")", "x", "t", xs, ts, res.values);
  }
  out.list(log);
  return kOk;
}

// ---- selftest -----------------------------------------------------------------

int cmd_selftest(Config& cfg, const RunOptions& run) {
  auto& log = *run.log;
  selftest::Options o;
  o.seed = run.seed;
  o.workers = run.workers;
  o.instances = static_cast<int>(count(cfg, "selftest.instances", o.instances, 1));
  for (double c : num_list(cfg, "selftest.criteria", "")) {
    if (c != std::floor(c) || c < 1 || c > 8)
      throw ConfigError(cfg.where("selftest.criteria") + ": criteria are integers 1..8");
    o.only.push_back(static_cast<int>(c));
  }
  cfg.reject_unknown();
  Output out(run);
  out.manifest(cfg);

  auto os = out.open("selftest.txt");
  bool all = true;
  for (int id = 1; id <= 8; ++id) {
    if (!o.only.empty() && std::find(o.only.begin(), o.only.end(), id) == o.only.end()) continue;
    const auto r = selftest::run_criterion(id, o);
    const std::string line = selftest::format_line(r);
    log << line << std::endl;
    os << line << '\n';
    all = all && r.pass;
  }
  log << (all ? "selftest: all criteria passed" : "selftest: FAILED") << '\n';
  os.close();
  out.list(log);
  return all ? kOk : kTheoremViolation;
}

}  // namespace qbsde::cli
