// Copyright 2026 The qbsde Authors
// SPDX-License-Identifier: Apache-2.0
#include "qbsde/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>

#include "qbsde/bsde.hpp"
#include "qbsde/classifier.hpp"
#include "qbsde/comparison.hpp"
#include "qbsde/errors.hpp"
#include "qbsde/pde.hpp"
#include "qbsde/rng.hpp"

namespace qbsde::selftest {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

// Uniform draws for one randomized instance.
class Draw {
 public:
  Draw(std::uint64_t seed, std::uint64_t instance) : s_(seed, instance) {}
  double uniform() { return s_.uniform(i_++); }
  double in(double a, double b) { return a + (b - a) * uniform(); }
  int pick(int n) { return std::min(n - 1, static_cast<int>(uniform() * n)); }
  bool coin(double p = 0.5) { return uniform() < p; }

 private:
  NormalStream s_;
  std::uint64_t i_ = 0;
};

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

// ---------------------------------------------------------------------------
// Random generators and problems

struct GenCase {
  Generator gen;
  double alpha;
};

Generator lambda_generator(std::string name, RealFn f, OpenInterval d) {
  Generator g;
  g.name = std::move(name);
  g.f = std::move(f);
  g.domain = d;
  g.sign_class = SignClass::mixed;
  return g;
}

GenCase random_generator(Draw& d) {
  switch (d.pick(8)) {
    case 0:
      return {builtin::constant(d.in(-1.5, 1.5)), d.in(-2, 2)};
    case 1: {
      const double delta = d.coin() ? d.in(0.05, 2.0) : d.in(-2.0, -0.05);
      return {builtin::delta_over_y(delta), d.in(0.3, 3)};
    }
    case 2:
      return {builtin::inv_y_squared_plus_one(), d.in(0.3, 3)};
    case 3:
      return {builtin::abs_log_over_y(), d.in(0.3, 3)};
    case 4:
      return {builtin::neg_inv_quadratic(), d.in(1.5, 5.5)};
    case 5: {
      const double a = d.in(-1, 1), b = d.in(-0.5, 0.5);
      const std::string e = "(" + format_double(a) + ")*exp(-y^2)+(" + format_double(b) + ")";
      return {expression_generator(e, OpenInterval()), d.in(-2, 2)};
    }
    case 6: {
      const double a = d.in(-1, 1);
      return {lambda_generator("a/(1+y^2)", [a](double y) { return a / (1 + y * y); }, OpenInterval()),
              d.in(-2, 2)};
    }
    default: {
      const double lo = d.in(-3, 0), hi = lo + d.in(1, 5);
      return {restrict_domain(builtin::constant(d.in(-1.5, 1.5)), OpenInterval(lo, hi)),
              lo + (hi - lo) * d.in(0.2, 0.8)};
    }
  }
}

// g = f - c - w exp(-y^2) <= f.
Generator shifted_down(const Generator& f, double c, double w) {
  Generator g = f;
  g.name = f.name + " - shift";
  g.f = [f = f.f, c, w](double y) { return f(y) - c - w * std::exp(-y * y); };
  g.closed_form = nullptr;
  g.antiderivative = nullptr;
  if (f.antiderivative && w == 0.0) g.antiderivative = [F = f.antiderivative, c](double y) { return F(y) - c * y; };
  g.lower_bound.reset();
  if (f.sign_class != SignClass::nonpositive) {
    g.sign_class = SignClass::mixed;
    g.upper_bound.reset();
  }
  return g;
}

struct ProblemCase {
  BsdeProblem p;
  ExactLaw law = ExactLaw::brownian;
  std::vector<double> xs;  // evaluation states
};

ForwardModel random_additive(Draw& d, ExactLaw& law) {
  if (d.coin()) {
    law = ExactLaw::brownian;
    return ForwardModel::brownian();
  }
  law = ExactLaw::scaled_brownian;
  return ForwardModel::scaled_brownian(d.in(-0.3, 0.3), d.in(0.5, 1.5));
}

TerminalMap random_two_point(Draw& d, double lo, double hi) {
  double c1 = d.in(lo, hi), c2 = d.in(lo, hi);
  if (c1 > c2) std::swap(c1, c2);
  return terminal::two_point(c1, c2, d.in(-0.5, 0.5));
}

ProblemCase random_problem(Draw& d) {
  ProblemCase pc;
  BsdeProblem& p = pc.p;
  p.T = 1.0;
  p.t0 = 0.0;
  p.x0 = d.in(-1, 1);
  double alpha = 0.0;
  switch (d.pick(8)) {
    case 0: {
      p.generator = builtin::constant(d.in(-1, 1));
      switch (d.pick(3)) {
        case 0: p.terminal = terminal::identity(); break;
        case 1: p.terminal = terminal::affine(d.in(0.2, 1.5), d.in(-1, 1)); break;
        default: p.terminal = random_two_point(d, -3, 3);
      }
      p.forward = random_additive(d, pc.law);
      alpha = d.in(-2, 2);
      break;
    }
    case 1: {
      p.generator = builtin::delta_over_y(d.coin() ? d.in(0.1, 1.5) : d.in(-1.5, -0.1));
      const double s = d.in(0.1, 0.6) * (d.coin() ? 1 : -1);
      p.terminal = terminal::exponential(s);
      p.forward = random_additive(d, pc.law);
      alpha = d.in(0.3, 3);
      break;
    }
    case 2: {
      p.generator = builtin::delta_over_y(d.coin() ? d.in(0.1, 1.5) : d.in(-1.5, -0.1));
      p.terminal = terminal::identity();
      pc.law = ExactLaw::geometric_brownian;
      p.forward = ForwardModel::geometric_brownian(d.in(-0.2, 0.2), d.in(0.2, 0.8));
      p.x0 = d.in(0.5, 2);
      alpha = d.in(0.3, 3);
      break;
    }
    case 3:
      p.generator = restrict_domain(builtin::half_over_y(), OpenInterval(0, 10));
      p.terminal = random_two_point(d, 0.5, 9.5);
      p.forward = random_additive(d, pc.law);
      alpha = d.in(1, 5);
      break;
    case 4:
      p.generator = builtin::neg_inv_quadratic();
      p.terminal = random_two_point(d, 1.5, 5.5);
      p.forward = random_additive(d, pc.law);
      alpha = d.in(2, 5);
      break;
    case 5:
      p.generator = builtin::inv_y_squared_plus_one();
      p.terminal = random_two_point(d, 0.3, 3);
      p.forward = random_additive(d, pc.law);
      alpha = d.in(0.5, 2);
      break;
    case 6:
      p.generator = builtin::abs_log_over_y();
      p.terminal = random_two_point(d, 0.2, 4);
      p.forward = random_additive(d, pc.law);
      alpha = d.in(0.5, 2);
      break;
    default: {
      const double a = d.in(-1, 1), b = d.in(-0.5, 0.5);
      p.generator = lambda_generator("a/(1+y^2)+b", [a, b](double y) { return a / (1 + y * y) + b; },
                                     OpenInterval());
      p.terminal = terminal::identity();
      p.forward = random_additive(d, pc.law);
      alpha = d.in(-2, 2);
    }
  }
  p.transform = build_transform(p.generator, alpha);
  if (pc.law == ExactLaw::geometric_brownian) {
    pc.xs = {0.6 * p.x0, p.x0, 1.6 * p.x0};
  } else {
    pc.xs = {p.x0 - 1, p.x0, p.x0 + 1};
  }
  return pc;
}

const std::vector<double> kTimes = {0.0, 0.25, 0.5, 0.75};

// ---------------------------------------------------------------------------
// Property checks. Each returns an empty string on success, else the reason.

using Check = std::function<std::string(Draw&)>;

std::string where(const std::string& what, double x, double got, double want) {
  return what + " at x = " + format_double(x) + ": got " + format_double(got) + ", want " + format_double(want);
}

std::string prop_monotone(Draw& d) {
  const GenCase gc = random_generator(d);
  const Transform t = build_transform(gc.gen, gc.alpha);
  const ClosedInterval w = sample_window(t.domain(), gc.alpha);
  double prev = -kInf;
  for (double x : linspace(w.lo, w.hi, 257)) {
    const double ux = t.u(x);
    if (!(ux > prev)) return gc.gen.name + ": u not increasing" + where("", x, ux, prev);
    if (!(t.u_prime(x) > 0)) return gc.gen.name + ": u' <= 0 at x = " + format_double(x);
    prev = ux;
  }
  return {};
}

std::string prop_roundtrip(Draw& d) {
  const GenCase gc = random_generator(d);
  const Transform t = build_transform(gc.gen, gc.alpha);
  if (std::abs(t.u(gc.alpha)) > 1e-12) return gc.gen.name + ": u(alpha) != 0";
  if (std::abs(t.u_prime(gc.alpha) - 1) > 1e-10) return gc.gen.name + ": u'(alpha) != 1";
  const ClosedInterval w = sample_window(t.domain(), gc.alpha);
  for (double x : linspace(w.lo, w.hi, 257)) {
    const double back = t.u_inv(t.u(x));
    if (std::abs(back - x) > 1e-8 * std::max(1.0, std::abs(x)))
      return gc.gen.name + ":" + where(" u_inv(u(x))", x, back, x);
  }
  return {};
}

// u'' = 2 f u' with u' differentiated numerically and f taken from the
// generator itself rather than from the transform.
std::string prop_ode(Draw& d) {
  const GenCase gc = random_generator(d);
  const Transform t = build_transform(gc.gen, gc.alpha);
  const ClosedInterval w = sample_window(t.domain(), gc.alpha);
  for (double x : linspace(w.lo, w.hi, 129)) {
    // A kink in f (|ln y|/y at 1) makes the central difference first order,
    // hence the small step for u''.
    const double h = 1e-4 * std::max(1.0, std::abs(x)), h2 = 1e-2 * h;
    bool near = false;
    for (double s : gc.gen.singular_points) near |= std::abs(x - s) < 4 * h;
    if (near) continue;
    const double up = t.u_prime(x);
    const double d2 = (t.u_prime(x + h2) - t.u_prime(x - h2)) / (2 * h2);
    const double want = 2.0 * gc.gen.f(x) * up;
    if (std::abs(d2 - want) > 1e-5 * std::max(1.0, std::abs(want)))
      return gc.gen.name + ":" + where(" u''", x, d2, want);
    const double d1 = (t.u(x + h) - t.u(x - h)) / (2 * h);
    if (std::abs(d1 - up) > 1e-5 * std::max(1.0, up) + 1e-9 * std::abs(t.u(x)) / h)
      return gc.gen.name + ":" + where(" u'", x, d1, up);
  }
  return {};
}

std::string prop_ordering(Draw& d) {
  const GenCase gc = random_generator(d);
  const double c = d.in(0, 0.8);
  const double wgt = d.coin() ? d.in(0, 0.8) : 0.0;
  const Generator g = shifted_down(gc.gen, c, wgt);
  const Transform tf = build_transform(gc.gen, gc.alpha);
  const Transform tg = build_transform(g, gc.alpha);
  const ClosedInterval w = sample_window(tf.domain(), gc.alpha);
  for (double x : linspace(w.lo, w.hi, 65)) {
    const double uf = tf.u(x), ug = tg.u(x);
    if (ug > uf + 1e-9 * std::max(1.0, std::abs(uf)))
      return gc.gen.name + ":" + where(" u_g > u_f", x, ug, uf);
  }
  return {};
}

// u^alpha = a u^beta + b with a = (u^alpha)'(beta), b = -a u^beta(alpha).
std::string prop_affine(Draw& d) {
  const GenCase gc = random_generator(d);
  const Transform ta = build_transform(gc.gen, gc.alpha);
  const ClosedInterval w = sample_window(ta.domain(), gc.alpha);
  const double beta = d.in(w.lo, w.hi);
  const Transform tb = build_transform(gc.gen, beta);
  const AffineCoefficients ab = ta.change_base_point(beta);
  const double a_ref = ta.u_prime(beta), b_ref = -a_ref * tb.u(gc.alpha);
  if (!(ab.a > 0)) return gc.gen.name + ": a <= 0";
  if (std::abs(ab.a - a_ref) > 1e-9 * a_ref) return gc.gen.name + ":" + where(" a", beta, ab.a, a_ref);
  if (std::abs(ab.b - b_ref) > 1e-9 * std::max(1.0, std::abs(b_ref)))
    return gc.gen.name + ":" + where(" b", beta, ab.b, b_ref);
  for (double x : linspace(w.lo, w.hi, 65)) {
    // Both sides are accurate to tol relative to their own terms; a can be
    // large, so the a u^beta + b side carries cancellation of that size.
    const double ub = tb.u(x), ua = ta.u(x), rhs = ab.a * ub + ab.b;
    const double tol = 1e-9 * std::max(1.0, std::abs(ua)) + 10 * ta.tol() * (ab.a * std::abs(ub) + std::abs(ab.b));
    if (std::abs(ua - rhs) > tol)
      return gc.gen.name + ":" + where(" u^alpha", x, ua, rhs);
  }
  return {};
}

GenCase random_signed_generator(Draw& d) {
  switch (d.pick(5)) {
    case 0: {
      const double c = d.in(0.1, 1.5) * (d.coin() ? 1 : -1);
      return {builtin::constant(c), d.in(-2, 2)};
    }
    case 1:
      return {builtin::inv_y_squared_plus_one(), d.in(0.3, 3)};
    case 2:
      return {builtin::neg_inv_quadratic(), d.in(1.5, 5.5)};
    case 3: {
      const double a = d.in(0, 1), b = d.in(0.1, 1);
      const double s = d.coin() ? 1.0 : -1.0;
      Generator g = lambda_generator("b+a*exp(-y^2)", [a, b, s](double y) { return s * (b + a * std::exp(-y * y)); },
                                     OpenInterval());
      if (s > 0) {
        g.sign_class = SignClass::nonnegative;
        g.lower_bound = b;
      } else {
        g.sign_class = SignClass::nonpositive;
        g.upper_bound = -b;
      }
      return {g, d.in(-2, 2)};
    }
    default: {
      const double lo = d.in(-3, 0), hi = lo + d.in(1, 5);
      const double c = d.in(0.1, 1.5) * (d.coin() ? 1 : -1);
      return {restrict_domain(builtin::constant(c), OpenInterval(lo, hi)), lo + (hi - lo) * d.in(0.2, 0.8)};
    }
  }
}

// f >= beta > 0 gives u >= (exp(2 beta (x - alpha)) - 1) / (2 beta); f <= -beta
// gives the mirror upper bound.
std::string prop_exp_bounds(Draw& d) {
  const GenCase gc = random_signed_generator(d);
  const Transform t = build_transform(gc.gen, gc.alpha);
  const ClosedInterval w = sample_window(t.domain(), gc.alpha);
  const auto& g = gc.gen;
  for (double x : linspace(w.lo, w.hi, 65)) {
    const double ux = t.u(x), dx = x - gc.alpha;
    if (g.lower_bound && *g.lower_bound > 0) {
      const double b = *g.lower_bound;
      const double bound = std::expm1(2 * b * dx) / (2 * b);
      if (ux < bound - 1e-9 * std::max(1.0, std::abs(bound))) return g.name + ":" + where(" lower", x, ux, bound);
    }
    if (g.upper_bound && *g.upper_bound < 0) {
      const double b = -*g.upper_bound;
      const double bound = -std::expm1(-2 * b * dx) / (2 * b);
      if (ux > bound + 1e-9 * std::max(1.0, std::abs(bound))) return g.name + ":" + where(" upper", x, ux, bound);
    }
    if (!t.exp_bound_check(x)) return g.name + ": exp_bound_check false at x = " + format_double(x);
  }
  return {};
}

std::string problem_name(const ProblemCase& pc) {
  return pc.p.generator.name + " / " + pc.p.terminal.name + " / " + pc.p.forward.name;
}

std::string prop_base_point(Draw& d) {
  const ProblemCase pc = random_problem(d);
  const ClosedInterval w = sample_window(pc.p.transform.domain(), pc.p.transform.base_point());
  BsdeProblem p2 = pc.p;
  p2.transform = build_transform(pc.p.generator, d.in(w.lo, w.hi));
  const QuadratureValue q1(pc.p, pc.law), q2(p2, pc.law);
  const double tol = 10.0 * std::max(pc.p.transform.tol(), p2.transform.tol());
  for (double t : kTimes) {
    for (double x : pc.xs) {
      const double y1 = q1.Y(t, x), y2 = q2.Y(t, x);
      if (std::abs(y1 - y2) > tol * std::max(1.0, std::abs(y1)))
        return problem_name(pc) + ": Y differs at t = " + format_double(t) + "," + where("", x, y2, y1);
      const double z1 = q1.Z(t, x), z2 = q2.Z(t, x);
      if (std::abs(z1 - z2) > 1e-6 * std::max(1.0, std::abs(z1)))
        return problem_name(pc) + ": Z differs at t = " + format_double(t) + "," + where("", x, z2, z1);
    }
  }
  return {};
}

// Tower property: E[u(Y(t, X_t))] over the law of X_t from (t0, x0) equals
// u(Y(t0, x0)) for every t.
std::string prop_martingale(Draw& d) {
  const ProblemCase pc = random_problem(d);
  const QuadratureValue q(pc.p, pc.law);
  const Transform& u = pc.p.transform;
  const double ref = u.u(q.Y(pc.p.t0, pc.p.x0));
  for (double t : {0.25, 0.5, 0.75}) {
    const double m = gaussian_expectation(
        pc.p.forward, t - pc.p.t0, pc.p.x0, [&](double x) { return u.u(q.Y(t, x)); }, {}, 64);
    if (std::abs(m - ref) > 1e-8 * std::max(1.0, std::abs(ref)))
      return problem_name(pc) + ": E[u(Y_t)] at t = " + format_double(t) + " is " + format_double(m) +
             ", u(Y_0) = " + format_double(ref);
  }
  return {};
}

// f >= 0: E[xi | X_t] <= Y <= y + alpha; f <= 0: y + alpha <= Y <= E[xi | X_t].
std::string prop_jensen(Draw& d) {
  ProblemCase pc = random_problem(d);
  while (pc.p.generator.sign_class == SignClass::mixed) pc = random_problem(d);
  const bool pos = pc.p.generator.sign_class == SignClass::nonnegative;
  const QuadratureValue q(pc.p, pc.law);
  const double alpha = pc.p.transform.base_point();
  for (double t : kTimes) {
    for (double x : pc.xs) {
      const double Y = q.Y(t, x), cm = q.conditional_mean(t, x), lin = q.y(t, x) + alpha;
      const double tol = 1e-9 * std::max({1.0, std::abs(Y), std::abs(lin)});
      const double lo = pos ? cm : lin, hi = pos ? lin : cm;
      if (Y < lo - tol || Y > hi + tol)
        return problem_name(pc) + ": Y = " + format_double(Y) + " outside [" + format_double(lo) + ", " +
               format_double(hi) + "] at t = " + format_double(t) + ", x = " + format_double(x);
    }
  }
  return {};
}

double draw_in(Draw& d, const OpenInterval& D) {
  const double lo = D.lower_finite() ? D.lo() : -5.0;
  const double hi = D.upper_finite() ? D.hi() : lo + 10.0;
  return lo + (hi - lo) * d.in(0.05, 0.95);
}

ClosedInterval draw_range(Draw& d, const OpenInterval& D, double at_least) {
  double a = draw_in(d, D), b = draw_in(d, D);
  if (a > b) std::swap(a, b);
  return {a, std::max(b, at_least)};
}

std::optional<double> draw_p(Draw& d) { return d.in(1, 4); }

TerminalMeta random_meta(Draw& d, const OpenInterval& D) {
  TerminalMeta m;
  if (d.coin(0.3)) m.lower_bound_const = draw_in(d, D);
  if (d.coin(0.25)) m.range_subset = draw_range(d, D, m.lower_bound_const.value_or(-kInf));
  if (d.coin(0.4)) m.xi_in_L1 = true;
  if (d.coin(0.4)) m.xi_in_Lp = draw_p(d);
  if (d.coin(0.3)) m.xi_minus_in_Lp = draw_p(d);
  if (d.coin(0.3)) m.xi_plus_in_Lp = draw_p(d);
  if (d.coin(0.4)) m.uf_xi_in_L1 = true;
  if (d.coin(0.4)) m.uf_xi_in_Lp = draw_p(d);
  m.uf_xi_in_Linf = d.coin(0.2);
  return m;
}

// Adds declarations or raises exponents; never retracts anything.
TerminalMeta strengthen(Draw& d, TerminalMeta m, const OpenInterval& D) {
  auto raise = [&](std::optional<double>& p) {
    if (!p) {
      if (d.coin()) p = draw_p(d);
    } else if (d.coin()) {
      *p += d.in(0, 2);
    }
  };
  if (!m.lower_bound_const && d.coin(0.3)) {
    const double z = draw_in(d, D);
    if (!m.range_subset || z <= m.range_subset->hi) m.lower_bound_const = z;
  }
  if (!m.range_subset && d.coin(0.3)) m.range_subset = draw_range(d, D, m.lower_bound_const.value_or(-kInf));
  if (d.coin()) m.xi_in_L1 = true;
  raise(m.xi_in_Lp);
  raise(m.xi_minus_in_Lp);
  raise(m.xi_plus_in_Lp);
  if (d.coin()) m.uf_xi_in_L1 = true;
  raise(m.uf_xi_in_Lp);
  if (d.coin(0.3)) m.uf_xi_in_Linf = true;
  return m;
}

std::string prop_classifier_strengthening(Draw& d) {
  const GenCase gc = d.coin() ? random_generator(d) : random_signed_generator(d);
  const OpenInterval& D = gc.gen.domain;
  const TerminalMeta weak = random_meta(d, D);
  const TerminalMeta strong = strengthen(d, weak, D);
  const SpaceReport rw = classify(gc.gen, weak, D.bounded());
  const SpaceReport rs = classify(gc.gen, strong, D.bounded());
  if (!rs.implies(rw))
    return gc.gen.name + ": strengthened metadata lost a conclusion\nweak:\n" + rw.to_text() + "strong:\n" +
           rs.to_text();
  return {};
}

// On D = R a bounded u_f(xi) does not bound xi, so no S^inf claim may follow
// from uf_xi_in_Linf alone.
std::string prop_negative_control(Draw& d) {
  Generator g;
  switch (d.pick(3)) {
    case 0:
      g = builtin::constant(d.in(0.05, 2) * (d.coin() ? 1 : -1));
      break;
    case 1: {
      const double a = d.in(0, 1), b = d.in(0.05, 1);
      g = lambda_generator("b+a/(1+y^2)", [a, b](double y) { return b + a / (1 + y * y); }, OpenInterval());
      g.sign_class = SignClass::nonnegative;
      g.lower_bound = b;
      break;
    }
    default: {
      const double a = d.in(-1, 1);
      g = lambda_generator("a*exp(-y^2)", [a](double y) { return a * std::exp(-y * y); }, OpenInterval());
    }
  }
  TerminalMeta m;
  m.uf_xi_in_Linf = true;
  const SpaceReport r = classify(g, m, false);
  if (r.has(Conclusion::Y_in_S_inf) || r.has(Conclusion::YZ_in_S_inf_H2BMO_with_range))
    return g.name + ": S^inf claimed from uf_xi_in_Linf alone\n" + r.to_text();
  return {};
}

struct Suite {
  const char* name;
  Check check;
};

const std::vector<Suite>& suites() {
  static const std::vector<Suite> s = {
      {"transform_monotonicity", prop_monotone},
      {"transform_roundtrip", prop_roundtrip},
      {"transform_ode_residual", prop_ode},
      {"transform_ordering", prop_ordering},
      {"transform_affine_base_point", prop_affine},
      {"transform_exponential_bounds", prop_exp_bounds},
      {"bsde_base_point_invariance", prop_base_point},
      {"bsde_martingale_constancy", prop_martingale},
      {"bsde_jensen_sandwich", prop_jensen},
      {"classifier_monotone_strengthening", prop_classifier_strengthening},
      {"classifier_unbounded_negative_control", prop_negative_control},
  };
  return s;
}

// ---------------------------------------------------------------------------
// Acceptance criteria

std::uint64_t criterion_seed(const Options& o, int id) { return mix_seed(o.seed, 0xc0 + id); }

std::shared_ptr<const PathBundle> paths(const BsdeProblem& p, std::size_t steps, std::size_t n, std::uint64_t seed,
                                        unsigned workers) {
  return std::make_shared<const PathBundle>(simulate(p.forward, p.t0, p.x0, p.T, steps, n, seed, workers));
}

double z_score(double est, double se, double truth) { return se > 0 ? std::abs(est - truth) / se : kInf; }

CriterionResult golden_values(const Options& o) {
  CriterionResult r{1, "half_over_y golden values", false, {}, 0};
  const auto t0 = Clock::now();
  const Generator gen = restrict_domain(builtin::half_over_y(), OpenInterval(0, 10));
  const Transform cf = build_transform(gen, 1.0);
  TransformOptions qo;
  qo.use_closed_form = false;
  const Transform tq = build_transform(gen, 1.0, qo);
  const double e_cf = std::max(std::abs(cf.u(2) - 1.5), std::abs(cf.u(5) - 12));
  const double e_q = std::max(std::abs(tq.u(2) - 1.5), std::abs(tq.u(5) - 12));

  const BsdeProblem p{gen, cf, terminal::two_point(2, 5, 0), ForwardModel::brownian(), 1, 0, 0};
  check_terminal_domain(p);
  const BsdeSolution s = solve_quadrature(p, ExactLaw::brownian);
  const double Ystar = std::sqrt(14.5);
  RegressionOptions ro;
  ro.workers = o.workers;
  const BsdeSolution reg = solve_regression(p, paths(p, 10, 100000, criterion_seed(o, 1), o.workers), ro);
  const double z = z_score(reg.Y0, reg.se_Y0, Ystar);
  r.seconds = seconds_since(t0);
  r.pass = e_cf <= 1e-10 && e_q <= 1e-8 && std::abs(s.y0 - 6.75) <= 1e-12 && std::abs(s.Y0 - Ystar) <= 1e-8 &&
           z <= 3 && r.seconds < 30;
  r.detail = "u err closed " + fmt(e_cf) + " quad " + fmt(e_q) + "; E[u(xi)]-27/4 " + fmt(s.y0 - 6.75) +
             "; Y0 err " + fmt(s.Y0 - Ystar) + "; regression Y0 " + fmt(reg.Y0, 10) + " (" + fmt(z, 3) + " SE)";
  return r;
}

CriterionResult constant_generator(const Options& o) {
  CriterionResult r{2, "constant generator closed form", false, {}, 0};
  const auto t0 = Clock::now();
  const Generator gen = builtin::constant(0.5);
  const BsdeProblem p{gen, build_transform(gen, 0.0), terminal::identity(), ForwardModel::brownian(), 1, 0, 0};

  QuadratureOptions qo;
  qo.times = linspace(0, 1, 21);
  qo.xs = linspace(-2, 2, 21);
  qo.workers = o.workers;
  const BsdeSolution s = solve_quadrature(p, ExactLaw::brownian, qo);
  double eY = 0, eZ = 0;
  for (std::size_t i = 0; i < qo.times.size(); ++i) {
    for (std::size_t j = 0; j < qo.xs.size(); ++j) {
      eY = std::max(eY, std::abs(s.surface.at(s.surface.Y, i, j) - (qo.xs[j] + 0.5 * (1 - qo.times[i]))));
      eZ = std::max(eZ, std::abs(s.surface.at(s.surface.Z, i, j) - 1));
    }
  }

  // u = e^x - 1 flattens against V's lower end; an odd or high degree fit
  // undershoots it in the left tail near T, a convex quadratic cannot.
  RegressionOptions ro;
  ro.degree = 2;
  ro.workers = o.workers;
  const BsdeSolution reg = solve_regression(p, paths(p, 10, 100000, criterion_seed(o, 2), o.workers), ro);
  const double z = z_score(reg.Y0, reg.se_Y0, 0.5);

  // Residual under step halving, with the exact-law engine on each grid.
  std::vector<double> mean_abs;
  for (std::size_t m : {10, 20, 40}) {
    const auto b = paths(p, m, 10000, mix_seed(criterion_seed(o, 2), m), o.workers);
    QuadratureOptions po;
    po.workers = o.workers;
    mean_abs.push_back(residual_check(solve_quadrature(p, ExactLaw::brownian, po, b), p).mean_abs);
  }
  double min_order = kInf;
  std::string orders;
  for (std::size_t k = 0; k + 1 < mean_abs.size(); ++k) {
    const double ord = std::log2(mean_abs[k] / mean_abs[k + 1]);
    min_order = std::min(min_order, ord);
    orders += (k ? ", " : "") + fmt(ord, 3);
  }
  r.seconds = seconds_since(t0);
  r.pass = eY <= 1e-6 && eZ <= 1e-6 && z <= 3 && min_order >= 0.8 && r.seconds < 60;
  r.detail = "grid max err Y " + fmt(eY) + " Z " + fmt(eZ) + "; regression Y0 " + fmt(reg.Y0, 8) + " (" +
             fmt(z, 3) + " SE); mean|R| m=10,20,40: " + fmt(mean_abs[0]) + ", " + fmt(mean_abs[1]) + ", " +
             fmt(mean_abs[2]) + "; observed orders " + orders + " (need >= 0.8)";
  return r;
}

CriterionResult power_transform(const Options& o) {
  CriterionResult r{3, "power transform lognormal moment", false, {}, 0};
  const auto t0 = Clock::now();
  const Generator gen = builtin::delta_over_y(1.0);
  const BsdeProblem p{gen, build_transform(gen, default_base_point(gen.domain)), terminal::exponential(0.2),
                      ForwardModel::brownian(), 1, 0, 0};
  const double truth = std::exp(0.06);
  const BsdeSolution s = solve_quadrature(p, ExactLaw::brownian);
  RegressionOptions ro;
  ro.workers = o.workers;
  const BsdeSolution reg = solve_regression(p, paths(p, 10, 100000, criterion_seed(o, 3), o.workers), ro);
  const double z = z_score(reg.Y0, reg.se_Y0, truth);
  r.seconds = seconds_since(t0);
  r.pass = std::abs(s.Y0 - truth) <= 1e-6 && z <= 3;
  r.detail = "quadrature err " + fmt(s.Y0 - truth) + "; regression Y0 " + fmt(reg.Y0, 8) + " (" + fmt(z, 3) + " SE)";
  return r;
}

CriterionResult range_confinement(const Options& o) {
  CriterionResult r{4, "range confinement on (1,6)", false, {}, 0};
  const auto t0 = Clock::now();
  const Generator gen = builtin::neg_inv_quadratic();
  const BsdeProblem p{gen, build_transform(gen, default_base_point(gen.domain)), terminal::two_point(2, 3, 0),
                      ForwardModel::brownian(), 1, 0, 0};
  check_terminal_domain(p);
  const auto b = paths(p, 20, 10000, criterion_seed(o, 4), o.workers);
  QuadratureOptions qo;
  qo.workers = o.workers;
  const BsdeSolution s = solve_quadrature(p, ExactLaw::brownian, qo, b);
  auto count_out = [](const BsdeSolution& sol, double& lo, double& hi) {
    std::size_t out = 0;
    lo = kInf;
    hi = -kInf;
    for (double y : sol.Y) {
      lo = std::min(lo, y);
      hi = std::max(hi, y);
      if (y < 2 - 1e-9 || y > 3 + 1e-9) ++out;
    }
    return out;
  };
  double lo, hi;
  const std::size_t out = count_out(s, lo, hi);
  RegressionOptions ro;
  ro.workers = o.workers;
  const BsdeSolution reg = solve_regression(p, b, ro);
  double rlo, rhi;
  const std::size_t rout = count_out(reg, rlo, rhi);
  r.seconds = seconds_since(t0);
  r.pass = out == 0 && !s.Y.empty();
  r.detail = "quadrature: " + std::to_string(s.Y.size() - out) + "/" + std::to_string(s.Y.size()) +
             " samples in [2,3], min " + fmt(lo, 12) + " max " + fmt(hi, 12) + "; regression (not graded): " +
             std::to_string(reg.Y.size() - rout) + "/" + std::to_string(reg.Y.size()) + " in range after " +
             std::to_string(reg.clamped_to_hull) + " hull clamps";
  return r;
}

CriterionResult comparison(const Options& o) {
  CriterionResult r{5, "comparison f1=0 vs f2=1/(2y)", false, {}, 0};
  const auto t0 = Clock::now();
  ComparisonCase c;
  const Generator f1 = builtin::constant(0.0);
  const Generator f2 = restrict_domain(builtin::half_over_y(), OpenInterval(0, 10));
  c.p1 = {f1, build_transform(f1, 0.0), terminal::two_point(2, 5, 0), ForwardModel::brownian(), 1, 0, 0};
  c.p2 = {f2, build_transform(f2, 1.0), terminal::two_point(2, 5, 0), ForwardModel::brownian(), 1, 0, 0};
  for (int i = 1; i < 200; ++i) c.f_grid.push_back(0.05 * i);
  c.condition = ComparisonCondition::a1;
  c.zeta = 2.0;
  c.expected_gap = std::sqrt(14.5) - 3.5;
  c.seed = criterion_seed(o, 5);
  c.workers = o.workers;
  const ComparisonReport rep = compare(c);
  const double gap = rep.Y2_0 - rep.Y1_0;
  r.seconds = seconds_since(t0);
  r.pass = rep.pass && rep.strict_ok && std::abs(rep.Y1_0 - 3.5) <= 1e-8 &&
           std::abs(rep.Y2_0 - std::sqrt(14.5)) <= 1e-8 && gap >= 0.30;
  r.detail = std::string("verdict ") + (rep.pass ? "PASS" : "FAIL") + "; Y1_0 " + fmt(rep.Y1_0, 12) + " Y2_0 " +
             fmt(rep.Y2_0, 12) + " gap " + fmt(gap, 6) + " strict " + (rep.strict_ok ? "ok" : "failed") +
             "; max violation " + fmt(rep.max_violation);
  return r;
}

CriterionResult converse(const Options& o) {
  CriterionResult r{6, "converse experiment", false, {}, 0};
  const auto t0 = Clock::now();
  ConverseParams prm;
  prm.seed = criterion_seed(o, 6);
  prm.workers = o.workers;
  const ConverseReport rep =
      converse_experiment(builtin::constant(0.1), builtin::constant(0.3), 0.0, 1.0, 1.0, 5, prm);
  double dev = 0;
  for (std::size_t i = 0; i < rep.tau.size(); ++i)
    for (std::size_t k = 0; k <= rep.tau[i]; ++k)
      dev = std::max(dev, std::abs(rep.y1->x(i, k) - rep.y2->x(i, k) - 0.2 * rep.y1->times[k]));
  r.seconds = seconds_since(t0);
  r.pass = rep.verdict == ConverseVerdict::contradiction_found && rep.fraction_ok == 1.0 && dev <= 1e-12 &&
           rep.tau.size() == 10000;
  r.detail = std::string(to_string(rep.verdict)) + "; bound holds on " + fmt(100 * rep.fraction_ok) + "% of " +
             std::to_string(rep.tau.size()) + " paths, min margin " + fmt(rep.min_margin) +
             "; max |gap - 0.2t| " + fmt(dev);
  return r;
}

CriterionResult pde(const Options& o) {
  CriterionResult r{7, "PDE Feynman-Kac vs finite differences", false, {}, 0};
  const auto t0 = Clock::now();
  const Generator gen = builtin::constant(0.5);
  PdeProblem p;
  p.generator = gen;
  p.transform = build_transform(gen, 0.0);
  p.terminal = terminal::identity();
  p.forward = ForwardModel::brownian();
  p.assumptions = {true, true, true, false};
  validate(p);
  FkParams fp;
  fp.workers = o.workers;
  const ValueSurface fk = solve_feynman_kac(p, fp);
  const ValueSurface fd = solve_fd_oracle(p);
  const std::size_t j0 = fk.nx() / 2;
  const double e_fk = std::abs(fk.v_at(0, j0) - 0.5);
  double agree = 0;
  for (std::size_t i = 0; i < fk.times.size(); ++i)
    for (std::size_t j = 0; j < fk.nx(); ++j)
      if (std::abs(fk.xs[j]) <= 2.0) agree = std::max(agree, std::abs(fk.v_at(i, j) - fd.v_at(i, j)));
  const Subgrid sub{0.1, 0.9, -2.0, 2.0};
  const double res1 = pde_residual(fd, p, sub).max_abs;
  PdeProblem p2 = p;
  p2.n_t = 2 * p.n_t;
  p2.n_x = 2 * (p.n_x - 1) + 1;
  const double res2 = pde_residual(solve_fd_oracle(p2), p2, sub).max_abs;
  r.seconds = seconds_since(t0);
  r.pass = e_fk <= 1e-6 && agree <= 1e-4 && res1 <= 1e-3 && res1 >= 3 * res2;
  r.detail = "FK v(0,0) err " + fmt(e_fk) + "; FD v(0,0) err " + fmt(std::abs(fd.v_at(0, j0) - 0.5)) +
             "; max |FK-FD| on |x|<=2 " + fmt(agree) + "; FD residual max " + fmt(res1) + " -> " + fmt(res2) +
             " (ratio " + fmt(res1 / res2, 3) + ")";
  return r;
}

CriterionResult properties(const Options& o) {
  CriterionResult r{8, "property suites", false, {}, 0};
  const auto t0 = Clock::now();
  const auto res = run_properties(o);
  int failed = 0;
  std::string first;
  for (const auto& p : res) {
    if (p.failures) {
      ++failed;
      if (first.empty()) first = p.name + ": " + p.first_failure;
    }
  }
  r.seconds = seconds_since(t0);
  r.pass = failed == 0 && r.seconds < 300;
  r.detail = std::to_string(res.size() - failed) + "/" + std::to_string(res.size()) + " suites clean on " +
             std::to_string(o.instances) + " instances each";
  if (!first.empty()) r.detail += "; first failure " + first;
  return r;
}

}  // namespace

const std::vector<std::string>& property_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& s : suites()) v.emplace_back(s.name);
    return v;
  }();
  return names;
}

PropertyResult run_property(const std::string& name, const Options& opts) {
  const auto& all = suites();
  const auto it = std::find_if(all.begin(), all.end(), [&](const Suite& s) { return name == s.name; });
  if (it == all.end()) throw ConfigError("unknown property suite '" + name + "'");
  const std::uint64_t seed = mix_seed(opts.seed, 0x100 + static_cast<std::uint64_t>(it - all.begin()));
  PropertyResult r;
  r.name = name;
  r.instances = opts.instances;
  const auto t0 = Clock::now();
  for (int i = 0; i < opts.instances; ++i) {
    Draw d(seed, static_cast<std::uint64_t>(i));
    std::string why;
    try {
      why = it->check(d);
    } catch (const std::exception& e) {
      why = std::string("exception: ") + e.what();
    }
    if (!why.empty()) {
      if (r.failures++ == 0) r.first_failure = "instance " + std::to_string(i) + ": " + why;
    }
  }
  r.seconds = seconds_since(t0);
  return r;
}

std::vector<PropertyResult> run_properties(const Options& opts) {
  std::vector<PropertyResult> out;
  for (const auto& n : property_names()) out.push_back(run_property(n, opts));
  return out;
}

CriterionResult run_criterion(int id, const Options& opts) {
  static const char* names[] = {"",
                                "half_over_y golden values",
                                "constant generator closed form",
                                "power transform lognormal moment",
                                "range confinement on (1,6)",
                                "comparison f1=0 vs f2=1/(2y)",
                                "converse experiment",
                                "PDE Feynman-Kac vs finite differences",
                                "property suites"};
  if (id < 1 || id > 8) throw ConfigError("criterion id must be in 1..8, got " + std::to_string(id));
  const auto t0 = Clock::now();
  try {
    switch (id) {
      case 1: return golden_values(opts);
      case 2: return constant_generator(opts);
      case 3: return power_transform(opts);
      case 4: return range_confinement(opts);
      case 5: return comparison(opts);
      case 6: return converse(opts);
      case 7: return pde(opts);
      default: return properties(opts);
    }
  } catch (const std::exception& e) {
    return {id, names[id], false, std::string("exception: ") + e.what(), seconds_since(t0)};
  }
}

std::vector<CriterionResult> run_acceptance(const Options& opts) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= 8; ++id) {
    if (!opts.only.empty() && std::find(opts.only.begin(), opts.only.end(), id) == opts.only.end()) continue;
    out.push_back(run_criterion(id, opts));
  }
  return out;
}

std::string format_line(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.pass ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name << " (" << fmt(r.seconds, 3) << " s) "
     << r.detail;
  return os.str();
}

std::string format_line(const PropertyResult& r) {
  std::ostringstream os;
  os << (r.failures ? "FAIL" : "PASS") << "  " << r.name << ": " << (r.instances - r.failures) << "/"
     << r.instances << " (" << fmt(r.seconds, 3) << " s)";
  if (r.failures) os << " first failure " << r.first_failure;
  return os.str();
}

}  // namespace qbsde::selftest
