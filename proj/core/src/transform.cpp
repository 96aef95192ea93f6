// Copyright 2026 The qbsde Authors
// SPDX-License-Identifier: Apache-2.0
#include "qbsde/transform.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "qbsde/errors.hpp"
#include "qbsde/interp.hpp"
#include "qbsde/quadrature.hpp"

namespace qbsde {

namespace {

// exp(700) is close to the largest finite double; beyond it u' overflows.
constexpr double kMaxExponent = 700.0;
// Ratios of successive tail increments at or above this are read as
// non-summable.
constexpr double kRatioCut = 0.95;
constexpr double kEps = std::numeric_limits<double>::epsilon();
// Panel budgets when the inner integral is itself numerical.
constexpr unsigned kInnerPanels = 16;
constexpr unsigned kOuterPanels = 64;

struct Side {
  std::vector<double> cuts;  // strictly moving away from alpha
  bool finite = false;
  double limit = 0.0;        // lim u at the endpoint when finite
};

}  // namespace

struct Transform::Impl {
  Generator gen;
  double alpha = 0.0;
  TransformOptions opts;
  Representation rep = Representation::tabulated;
  OpenInterval range;
  std::optional<TransformFormula> formula;
  bool imported = false;
  double F_alpha = 0.0;

  std::vector<double> xs, I, U, Up;
  MonotoneCubic seed;

  double qtol() const { return std::max(opts.tol, 1e-15); }
  // The inner integral feeds the outer integrand, so it runs tighter; an
  // inner error at the outer tolerance reads as noise and stalls bisection.
  double inner_tol() const { return std::max(1e-3 * opts.tol, 1e-15); }

  // int_a^b f.
  double inner_between(double a, double b, bool* ok = nullptr) const {
    if (formula) return 0.5 * (std::log(formula->u_prime(b)) - std::log(formula->u_prime(a)));
    if (gen.antiderivative) return gen.antiderivative(b) - gen.antiderivative(a);
    const auto r = quad::adaptive(gen.f, a, b, inner_tol(), near_end(b) ? 4 : kInnerPanels);
    // Loose acceptance: an expression like 1/(y-1) loses digits to
    // cancellation near its endpoint, while a genuinely non-integrable f
    // leaves an error of the order of the value itself.
    if (ok) *ok = std::isfinite(r.value) && r.error <= 1e-6 * std::max(r.l1, 1e-300) + 1e-14;
    return r.value;
  }

  // int_alpha^y f given I(a) = int_alpha^a f.
  double inner_from(double a, double Ia, double y) const {
    if (gen.antiderivative) return gen.antiderivative(y) - F_alpha;
    return Ia + inner_between(a, y);
  }

  // int_a^b u'(y) dy given I(a).
  double exp_integral(double a, double Ia, double b) const {
    if (formula) return formula->u(b) - formula->u(a);
    auto integrand = [&](double y) { return std::exp(2.0 * inner_from(a, Ia, y)); };
    unsigned panels = 2000;
    if (!gen.antiderivative) panels = near_end(b) ? 8 : kOuterPanels;
    return quad::adaptive(integrand, a, b, qtol(), panels).value;
  }

  // Within this distance of a finite end of D, failed inner integrals are
  // blamed on lost digits rather than on f.
  bool near_end(double x) const {
    const OpenInterval& d = gen.domain;
    return (d.lower_finite() && x - d.lo() <= 1e-6 * (alpha - d.lo())) ||
           (d.upper_finite() && d.hi() - x <= 1e-6 * (d.hi() - alpha));
  }

  bool in_domain(double x) const {
    if (imported) return x >= xs.front() && x <= xs.back();
    return gen.domain.contains(x);
  }

  void require_domain(double x, const char* what) const {
    if (!in_domain(x)) {
      throw DomainError(std::string(what) + ": x = " + format_double(x) + " is outside D = " +
                        to_string(gen.domain));
    }
  }

  std::size_t nearest(double x) const {
    auto it = std::lower_bound(xs.begin(), xs.end(), x);
    if (it == xs.begin()) return 0;
    if (it == xs.end()) return xs.size() - 1;
    const std::size_t j = static_cast<std::size_t>(it - xs.begin());
    return (x - xs[j - 1] <= xs[j] - x) ? j - 1 : j;
  }

  double eval_u(double x) const {
    if (formula) return formula->u(x);
    if (imported) return seed(x);
    const std::size_t j = nearest(x);
    if (xs[j] == x) return U[j];
    return U[j] + exp_integral(xs[j], I[j], x);
  }

  double eval_u_prime(double x) const {
    if (formula) return formula->u_prime(x);
    if (imported) return seed.derivative(x);
    const std::size_t j = nearest(x);
    if (xs[j] == x) return Up[j];
    return std::exp(2.0 * inner_from(xs[j], I[j], x));
  }

  Side analyse_side(int dir) const;
  void build_grid(const Side& lo, const Side& hi);
  double invert(double y) const;
};

Side Transform::Impl::analyse_side(int dir) const {
  const OpenInterval& d = gen.domain;
  const double e = dir > 0 ? d.hi() : d.lo();
  const bool finite_end = std::isfinite(e);
  const double scale = std::max(1.0, std::abs(alpha));
  const int kmax = finite_end ? 2200 : 1100;

  Side side;
  double prev = alpha, I_prev = 0.0, S = 0.0, prev_seg = 0.0;
  int slow = 0, fast = 0;
  double last_ratio = 1.0;
  bool reached_end = false;
  for (int k = 1; k <= kmax; ++k) {
    const double c = finite_end ? e + (alpha - e) * std::ldexp(1.0, -k)
                                : alpha + dir * scale * std::ldexp(1.0, k - 1);
    // Stop a few thousand ulps short of a finite end: closer in, f itself is
    // typically dominated by cancellation (e.g. y - e) and the rest of the
    // tail is extrapolated geometrically.
    if (!d.contains(c) || c == prev ||
        (finite_end && std::abs(c - e) < 4096 * kEps * std::max(1.0, std::abs(e)))) {
      reached_end = true;
      break;
    }
    bool ok = true;
    const double dI = inner_between(prev, c, &ok);
    // An infinite exponent (u' underflowing to 0 or overflowing) describes
    // the endpoint behaviour, not a failure of local integrability.
    if (dI == -kInf) {
      side.finite = true;
      side.limit = S;
      return side;
    }
    if (dI == kInf) break;
    if ((!ok || std::isnan(dI)) && near_end(c)) {
      reached_end = true;
      break;
    }
    if (!ok || std::isnan(dI)) {
      throw NotLocallyIntegrableError("int f over [" + format_double(std::min(prev, c)) + ", " +
                                      format_double(std::max(prev, c)) +
                                      "] does not converge for generator '" + gen.name + "'");
    }
    const double Ic = I_prev + dI;
    if (2.0 * Ic > kMaxExponent) break;  // u' overflows: V is unbounded here
    const double seg = exp_integral(prev, I_prev, c);
    if (!std::isfinite(seg)) break;
    S += seg;
    side.cuts.push_back(c);
    const double aseg = std::abs(seg);
    if (std::abs(S) > opts.divergence_cap) break;
    if (prev_seg > 0.0) {
      last_ratio = aseg / prev_seg;
      if (last_ratio >= kRatioCut) {
        ++slow;
        fast = 0;
      } else {
        slow = 0;
        ++fast;
      }
    } else if (aseg == 0.0) {
      ++fast;
      last_ratio = 0.0;
    }
    if (slow >= 8) break;
    if (fast >= 3 && aseg <= 1e-2 * opts.tol * std::max(1.0, std::abs(S))) {
      side.finite = true;
      side.limit = S + (last_ratio < 1.0 ? seg * last_ratio / (1.0 - last_ratio) : 0.0);
      return side;
    }
    prev_seg = aseg;
    prev = c;
    I_prev = Ic;
  }
  if (reached_end && finite_end && last_ratio < 1.0) {
    side.finite = true;
    const double seg = (side.cuts.empty() ? 0.0 : prev_seg) * (dir > 0 ? 1.0 : -1.0);
    side.limit = S + seg * last_ratio / (1.0 - last_ratio);
  }
  return side;
}

void Transform::Impl::build_grid(const Side& lo, const Side& hi) {
  std::vector<double> knots;
  knots.reserve(lo.cuts.size() + hi.cuts.size() + gen.singular_points.size() + 1);
  for (auto it = lo.cuts.rbegin(); it != lo.cuts.rend(); ++it) knots.push_back(*it);
  knots.push_back(alpha);
  for (double c : hi.cuts) knots.push_back(c);
  for (double s : gen.singular_points) {
    if (gen.domain.contains(s)) knots.push_back(s);
  }
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  const std::size_t nseg = knots.size() > 1 ? knots.size() - 1 : 1;
  const int per = std::max(1, opts.grid_nodes / static_cast<int>(nseg));
  xs.clear();
  for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
    const double a = knots[s], b = knots[s + 1];
    for (int k = 0; k < per; ++k) xs.push_back(a + (b - a) * k / per);
  }
  xs.push_back(knots.back());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  if (xs.size() < 2) {
    // Degenerate: no analysable side. Keep a tiny symmetric stencil.
    const double h = 1e-3 * std::max(1.0, std::abs(alpha));
    xs = {alpha - h, alpha, alpha + h};
    xs.erase(std::remove_if(xs.begin(), xs.end(), [&](double x) { return !gen.domain.contains(x); }),
             xs.end());
    if (xs.size() < 2) throw NumericalError("domain too narrow to tabulate the transform");
  }

  const std::size_t n = xs.size();
  const std::size_t ia = static_cast<std::size_t>(
      std::lower_bound(xs.begin(), xs.end(), alpha) - xs.begin());
  I.assign(n, 0.0);
  U.assign(n, 0.0);
  Up.assign(n, 1.0);
  auto step = [&](std::size_t from, std::size_t to) {
    bool ok = true;
    const double dI = formula ? 0.0 : (gen.antiderivative ? 0.0 : inner_between(xs[from], xs[to], &ok));
    if ((!ok || !std::isfinite(dI)) && !near_end(xs[to])) {
      throw NotLocallyIntegrableError("int f over [" + format_double(std::min(xs[from], xs[to])) +
                                      ", " + format_double(std::max(xs[from], xs[to])) +
                                      "] does not converge for generator '" + gen.name + "'");
    }
    if (formula) {
      U[to] = formula->u(xs[to]);
      Up[to] = formula->u_prime(xs[to]);
      I[to] = 0.5 * std::log(Up[to]);
      return;
    }
    I[to] = gen.antiderivative ? gen.antiderivative(xs[to]) - F_alpha : I[from] + dI;
    U[to] = U[from] + exp_integral(xs[from], I[from], xs[to]);
    Up[to] = std::exp(2.0 * I[to]);
  };
  for (std::size_t i = ia + 1; i < n; ++i) step(i - 1, i);
  for (std::size_t i = ia; i-- > 0;) step(i + 1, i);

  for (std::size_t i = 1; i < n; ++i) {
    if (!(U[i] >= U[i - 1]) || !std::isfinite(U[i])) {
      throw NumericalError("tabulated transform lost monotonicity near x = " + format_double(xs[i]));
    }
  }
  seed = MonotoneCubic(xs, U, Up);
}

double Transform::Impl::invert(double y) const {
  if (formula) return formula->u_inv(y);
  if (imported) {
    const double x0 = seed.inverse(y);
    double x = x0;
    for (int it = 0; it < 3; ++it) {
      const double d = seed.derivative(x);
      if (!(d > 0)) break;
      const double xn = std::clamp(x - (seed(x) - y) / d, xs.front(), xs.back());
      if (xn == x) break;
      x = xn;
    }
    return x;
  }

  double lo, hi, x;
  if (y >= U.front() && y <= U.back()) {
    const std::size_t i = seed.value_cell(y);
    lo = xs[i];
    hi = xs[i + 1];
    x = std::clamp(seed.inverse(y), lo, hi);
  } else {
    // Beyond the tabulated nodes: bracket with exact evaluations.
    const bool below = y < U.front();
    const double edge = below ? xs.front() : xs.back();
    const double end = below ? gen.domain.lo() : gen.domain.hi();
    double far = edge;
    for (int k = 1; k < 2000; ++k) {
      far = std::isfinite(end) ? end + (edge - end) * std::ldexp(1.0, -k)
                               : edge + (below ? -1.0 : 1.0) * std::max(1.0, std::abs(edge)) *
                                            std::ldexp(1.0, k - 1);
      const double uf = eval_u(far);
      if (below ? uf <= y : uf >= y) break;
    }
    lo = below ? far : edge;
    hi = below ? edge : far;
    while (hi - lo > 1e-13 * std::max(1.0, std::abs(lo))) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (eval_u(mid) < y ? lo : hi) = mid;
    }
    x = 0.5 * (lo + hi);
  }
  // Derivative polish, safeguarded by the bracket. The step test comes
  // first: a rounding-level residual moves a bracket end onto x, and the
  // bisection fallback would then throw the converged x away.
  for (int it = 0; it < 64; ++it) {
    const double r = eval_u(x) - y;
    if (r == 0.0) break;
    (r > 0 ? hi : lo) = x;
    const double step = r / eval_u_prime(x);
    if (std::abs(step) <= 4 * kEps * std::max(1.0, std::abs(x))) break;
    double xn = x - step;
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    x = xn;
    if (hi - lo <= 4 * kEps * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

const char* to_string(Transform::Representation r) noexcept {
  return r == Transform::Representation::closed_form ? "closed_form" : "tabulated";
}

Transform build_transform(const Generator& gen, double alpha, const TransformOptions& opts) {
  gen.validate();
  if (!(opts.tol > 0)) throw ConfigError("transform tolerance must be positive");
  if (opts.grid_nodes < 2) throw ConfigError("transform grid needs at least 2 nodes");
  if (!gen.domain.contains(alpha)) {
    throw DomainError("base point " + format_double(alpha) + " is outside D = " +
                      to_string(gen.domain));
  }
  auto impl = std::make_shared<Transform::Impl>();
  impl->gen = gen;
  impl->alpha = alpha;
  impl->opts = opts;
  if (gen.antiderivative) impl->F_alpha = gen.antiderivative(alpha);
  if (opts.use_closed_form && gen.closed_form) {
    impl->formula = gen.closed_form(alpha);
    impl->rep = Transform::Representation::closed_form;
  }

  const Side lo = impl->analyse_side(-1);
  const Side hi = impl->analyse_side(+1);
  double vlo = lo.finite ? lo.limit : -kInf;
  double vhi = hi.finite ? hi.limit : kInf;
  if (impl->formula) {
    // The exact limits take precedence over the numerical series.
    const double flo = impl->formula->u(gen.domain.lo());
    const double fhi = impl->formula->u(gen.domain.hi());
    if (!std::isnan(flo)) vlo = flo;
    if (!std::isnan(fhi)) vhi = fhi;
  }
  impl->range = OpenInterval(vlo, vhi);
  impl->build_grid(lo, hi);
  return Transform(std::move(impl));
}

Transform build_transform(const Generator& gen, double alpha, double tol,
                          std::optional<int> grid_hint) {
  TransformOptions o;
  o.tol = tol;
  if (grid_hint) o.grid_nodes = *grid_hint;
  return build_transform(gen, alpha, o);
}

double Transform::u(double x) const {
  impl_->require_domain(x, "u");
  return impl_->eval_u(x);
}

double Transform::u_prime(double x) const {
  impl_->require_domain(x, "u'");
  return impl_->eval_u_prime(x);
}

double Transform::u_second(double x) const {
  impl_->require_domain(x, "u''");
  return 2.0 * impl_->gen.f(x) * impl_->eval_u_prime(x);
}

double Transform::u_inv(double y) const {
  const Impl& m = *impl_;
  const bool inside = m.imported ? (y >= m.U.front() && y <= m.U.back()) : m.range.contains(y);
  if (!inside) {
    throw RangeError("u^{-1}: y = " + format_double(y) + " is outside V = " + to_string(m.range));
  }
  return m.invert(y);
}

AffineCoefficients Transform::change_base_point(double beta) const {
  impl_->require_domain(beta, "change_base_point");
  return {impl_->eval_u_prime(beta), impl_->eval_u(beta)};
}

bool Transform::exp_bound_check(double x) const {
  const Impl& m = *impl_;
  m.require_domain(x, "exp_bound_check");
  const bool lower = m.gen.lower_bound && *m.gen.lower_bound > 0;
  const bool upper = m.gen.upper_bound && *m.gen.upper_bound < 0;
  if (!lower && !upper) {
    throw UnsupportedError("generator '" + m.gen.name +
                           "' declares no lower bound > 0 and no upper bound < 0");
  }
  const double ux = m.eval_u(x);
  const double dx = x - m.alpha;
  bool ok = true;
  if (lower) {
    const double b = *m.gen.lower_bound;
    const double bound = std::expm1(2.0 * b * dx) / (2.0 * b);
    ok = ok && ux >= bound - m.opts.tol * std::max(1.0, std::abs(bound)) * 10;
  }
  if (upper) {
    const double b = -*m.gen.upper_bound;
    const double bound = -std::expm1(-2.0 * b * dx) / (2.0 * b);
    ok = ok && ux <= bound + m.opts.tol * std::max(1.0, std::abs(bound)) * 10;
  }
  return ok;
}

double Transform::base_point() const { return impl_->alpha; }
const Generator& Transform::generator() const { return impl_->gen; }
const OpenInterval& Transform::domain() const { return impl_->gen.domain; }
const OpenInterval& Transform::range() const { return impl_->range; }
Transform::Representation Transform::representation() const { return impl_->rep; }
double Transform::tol() const { return impl_->opts.tol; }
bool Transform::imported() const { return impl_->imported; }

std::vector<TableRow> Transform::table() const {
  const Impl& m = *impl_;
  std::vector<TableRow> rows(m.xs.size());
  for (std::size_t i = 0; i < m.xs.size(); ++i) rows[i] = {m.xs[i], m.U[i], m.Up[i]};
  return rows;
}

void Transform::write_csv(std::ostream& os) const {
  os << "x,u,uprime\n";
  for (const TableRow& r : table()) {
    os << format_double(r.x) << ',' << format_double(r.u) << ',' << format_double(r.uprime) << '\n';
  }
}

Transform Transform::read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("transform table: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,u,uprime") throw ConfigError("transform table: expected header 'x,u,uprime'");
  auto impl = std::make_shared<Impl>();
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c)) {
      throw ConfigError("transform table line " + std::to_string(lineno) + ": expected 3 columns");
    }
    try {
      impl->xs.push_back(parse_double(a));
      impl->U.push_back(parse_double(b));
      impl->Up.push_back(parse_double(c));
    } catch (const ConfigError& e) {
      throw ConfigError("transform table line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (impl->xs.size() < 2) throw ConfigError("transform table needs at least two rows");
  impl->seed = MonotoneCubic(impl->xs, impl->U, impl->Up);
  impl->imported = true;
  impl->rep = Representation::tabulated;
  impl->gen.name = "table";
  impl->gen.domain = OpenInterval(impl->xs.front(), impl->xs.back());
  impl->range = OpenInterval(impl->U.front(), impl->U.back());
  // f = (log u')' / 2, piecewise constant between nodes.
  auto xs = impl->xs;
  auto up = impl->Up;
  impl->gen.f = [xs, up](double y) {
    auto it = std::upper_bound(xs.begin(), xs.end(), y);
    std::size_t i = it == xs.begin() ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
    i = std::min(i, xs.size() - 2);
    return 0.5 * (std::log(up[i + 1]) - std::log(up[i])) / (xs[i + 1] - xs[i]);
  };
  if (!(impl->U.front() <= 0.0 && impl->U.back() >= 0.0)) {
    throw ConfigError("transform table: u never crosses 0, base point undefined");
  }
  impl->alpha = impl->seed.inverse(0.0);
  return Transform(std::move(impl));
}

ClosedInterval sample_window(const OpenInterval& d, double alpha) {
  const double s = 3.0 * std::max(1.0, std::abs(alpha));
  const double lo = d.lower_finite() ? d.lo() + 0.25 * (alpha - d.lo()) : alpha - s;
  const double hi = d.upper_finite() ? d.hi() - 0.25 * (d.hi() - alpha) : alpha + s;
  return {lo, hi};
}

InvariantReport check_invariants(const Transform& t, int n) {
  InvariantReport rep;
  const Generator& g = t.generator();
  const ClosedInterval w = sample_window(t.domain(), t.base_point());
  const double beta = w.lo + 0.3 * (w.hi - w.lo);
  TransformOptions o;
  o.tol = t.tol();
  const Transform tb = t.imported() ? t : build_transform(g, beta, o);
  const AffineCoefficients ab = t.change_base_point(beta);
  double prev = -kInf;
  for (int i = 0; i < n; ++i) {
    const double x = w.lo + (w.hi - w.lo) * i / (n - 1);
    const double ux = t.u(x);
    if (!(ux > prev)) rep.monotone = false;
    prev = ux;
    if (t.range().contains(ux)) {
      rep.max_roundtrip_error =
          std::max(rep.max_roundtrip_error, std::abs(t.u_inv(ux) - x) / std::max(1.0, std::abs(x)));
    }
    const double h = 1e-4;
    bool near_singular = false;
    for (double s : g.singular_points) near_singular |= std::abs(x - s) < 4 * h;
    if (!t.imported() && !near_singular && t.domain().contains(x - h) && t.domain().contains(x + h)) {
      const double d2 = (t.u(x + h) - 2.0 * ux + t.u(x - h)) / (h * h);
      const double ex = t.u_second(x);
      rep.max_ode_residual =
          std::max(rep.max_ode_residual, std::abs(d2 - ex) / std::max(1.0, std::abs(ex)));
    }
    if (!t.imported()) {
      const double rhs = ab.a * tb.u(x) + ab.b;
      rep.max_affine_error =
          std::max(rep.max_affine_error, std::abs(ux - rhs) / std::max(1.0, std::abs(ux)));
    }
  }
  rep.ok = rep.monotone && rep.max_roundtrip_error <= std::max(10 * t.tol(), 1e-9) &&
           rep.max_ode_residual <= 1e-4 && rep.max_affine_error <= std::max(10 * t.tol(), 1e-9);
  return rep;
}

}  // namespace qbsde
