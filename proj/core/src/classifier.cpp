// Copyright 2026 The qbsde Authors
// SPDX-License-Identifier: Apache-2.0
#include "qbsde/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qbsde/errors.hpp"
#include "qbsde/transform.hpp"

namespace qbsde {

const char* to_string(Conclusion c) noexcept {
  switch (c) {
    case Conclusion::solution_exists_unique: return "solution_exists_unique";
    case Conclusion::Y_in_S_inf: return "Y_in_S_inf";
    case Conclusion::YZ_in_S_inf_H2BMO_with_range: return "YZ_in_S_inf_H2BMO_with_range";
    case Conclusion::YZ_in_Sp_H2p: return "YZ_in_Sp_H2p";
    case Conclusion::YZ_in_Sr_H2: return "YZ_in_Sr_H2";
    case Conclusion::Y_in_Sp: return "Y_in_Sp";
    case Conclusion::Y_in_Sr: return "Y_in_Sr";
    case Conclusion::necessary_L1_violated: return "necessary_L1_violated";
  }
  return "unknown";
}

const char* to_string(TailDiagnostic::Verdict v) noexcept {
  return v == TailDiagnostic::Verdict::plausibly_L1 ? "plausibly_L1" : "heavy_tail_warning";
}

namespace {

void check_exponent(const std::optional<double>& p, const char* name) {
  if (p && !(*p >= 1.0)) {
    throw ValidationError(std::string(name) + " must be >= 1, got " + format_double(*p));
  }
}

std::optional<double> max_opt(std::optional<double> a, std::optional<double> b) {
  if (!a) return b;
  if (!b) return a;
  return std::max(*a, *b);
}

// The declared field that establishes each derived fact, for trails.
std::string why_uf_L1(const TerminalMeta& m) {
  if (m.uf_xi_in_L1 == true) return "uf_xi_in_L1";
  if (m.uf_xi_in_Linf) return "uf_xi_in_Linf";
  if (m.uf_xi_in_Lp) return "uf_xi_in_Lp=" + format_double(*m.uf_xi_in_Lp);
  return "range_subset";
}

std::string why_xi_L1(const TerminalMeta& m) {
  if (m.xi_in_L1 == true) return "xi_in_L1";
  if (m.xi_in_Lp) return "xi_in_Lp=" + format_double(*m.xi_in_Lp);
  return "range_subset";
}

std::string why_part(const TerminalMeta& m, const std::optional<double>& part, const char* name,
                     double p) {
  if (part && *part == p) return std::string(name) + "=" + format_double(p);
  if (m.xi_in_Lp && *m.xi_in_Lp == p) return "xi_in_Lp=" + format_double(p);
  return "range_subset";
}

// Exponent reached by a conclusion, with the S^r (r < 1) families ranked
// below every p > 1.
double strength(const ReportEntry& e) {
  switch (e.conclusion) {
    case Conclusion::YZ_in_Sp_H2p:
    case Conclusion::Y_in_Sp: return e.p.value_or(1.0);
    default: return 0.0;
  }
}

bool covers(const ReportEntry& s, const ReportEntry& w) {
  using C = Conclusion;
  if (s.conclusion == w.conclusion) {
    if (w.conclusion == C::YZ_in_Sp_H2p || w.conclusion == C::Y_in_Sp) return strength(s) >= strength(w);
    if (w.conclusion == C::YZ_in_S_inf_H2BMO_with_range && w.y_range && s.y_range) {
      return s.y_range->lo >= w.y_range->lo && s.y_range->hi <= w.y_range->hi;
    }
    return true;
  }
  // (Y,Z) in S^p x H^2p gives Y in S^p; any p > 1 gives every r < 1.
  if (w.conclusion == C::Y_in_Sp && s.conclusion == C::YZ_in_Sp_H2p) return strength(s) >= strength(w);
  if (w.conclusion == C::Y_in_Sr) {
    return s.conclusion == C::Y_in_Sp || s.conclusion == C::YZ_in_Sp_H2p ||
           s.conclusion == C::YZ_in_Sr_H2 || s.conclusion == C::Y_in_S_inf ||
           s.conclusion == C::YZ_in_S_inf_H2BMO_with_range;
  }
  if (w.conclusion == C::YZ_in_Sr_H2) return s.conclusion == C::YZ_in_Sp_H2p;
  if (w.conclusion == C::Y_in_S_inf) return s.conclusion == C::YZ_in_S_inf_H2BMO_with_range;
  return false;
}

}  // namespace

TerminalMeta normalize(const TerminalMeta& meta, const OpenInterval& D) {
  TerminalMeta m = meta;
  check_exponent(m.xi_in_Lp, "xi_in_Lp");
  check_exponent(m.xi_minus_in_Lp, "xi_minus_in_Lp");
  check_exponent(m.xi_plus_in_Lp, "xi_plus_in_Lp");
  check_exponent(m.uf_xi_in_Lp, "uf_xi_in_Lp");

  if (m.range_subset) {
    const ClosedInterval r = *m.range_subset;
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi)) {
      throw ValidationError("range_subset must be a compact interval; half-infinite ranges are refused");
    }
    if (!(r.lo <= r.hi)) throw ValidationError("range_subset requires a <= b");
    if (!D.contains(r.lo) || !D.contains(r.hi)) {
      throw ValidationError("range_subset [" + format_double(r.lo) + ", " + format_double(r.hi) +
                            "] is not inside D = " + to_string(D));
    }
    if (m.xi_in_L1 == false || m.uf_xi_in_L1 == false) {
      throw ValidationError("range_subset contradicts a declared non-integrability");
    }
    if (m.lower_bound_const && *m.lower_bound_const > r.hi) {
      throw ValidationError("lower_bound_const exceeds the declared range");
    }
    // Compactness in D: xi and u_f(xi) are bounded.
    m.xi_in_L1 = true;
    m.uf_xi_in_L1 = true;
    m.uf_xi_in_Linf = true;
    m.xi_in_Lp = kInf;
    m.uf_xi_in_Lp = kInf;
  }
  if (m.lower_bound_const && !D.contains(*m.lower_bound_const)) {
    throw ValidationError("lower_bound_const " + format_double(*m.lower_bound_const) +
                          " is not in D = " + to_string(D));
  }
  if (m.xi_in_Lp) {
    if (m.xi_in_L1 == false) throw ValidationError("xi_in_Lp declared while xi_in_L1 is false");
    m.xi_in_L1 = true;
    m.xi_minus_in_Lp = max_opt(m.xi_minus_in_Lp, m.xi_in_Lp);
    m.xi_plus_in_Lp = max_opt(m.xi_plus_in_Lp, m.xi_in_Lp);
  }
  if (m.uf_xi_in_Linf) {
    if (m.uf_xi_in_L1 == false) throw ValidationError("uf_xi_in_Linf declared while uf_xi_in_L1 is false");
    m.uf_xi_in_L1 = true;
    m.uf_xi_in_Lp = kInf;
  }
  if (m.uf_xi_in_Lp) {
    if (m.uf_xi_in_L1 == false) throw ValidationError("uf_xi_in_Lp declared while uf_xi_in_L1 is false");
    m.uf_xi_in_L1 = true;
  }
  if (m.xi_in_L1 == false && (m.xi_minus_in_Lp && m.xi_plus_in_Lp)) {
    throw ValidationError("xi_minus and xi_plus integrable while xi_in_L1 is false");
  }
  return m;
}

SpaceReport classify(const Generator& gen, const TerminalMeta& meta, bool D_bounded,
                     const std::optional<OpenInterval>& V) {
  gen.validate();
  const TerminalMeta m = normalize(meta, gen.domain);
  SpaceReport rep;
  auto add = [&](Conclusion c, std::string source, std::vector<std::string> trail,
                 std::optional<double> p = std::nullopt,
                 std::optional<ClosedInterval> range = std::nullopt) {
    std::vector<std::string> seen;
    for (auto& t : trail)
      if (std::find(seen.begin(), seen.end(), t) == seen.end()) seen.push_back(std::move(t));
    trail = std::move(seen);
    rep.entries.push_back({c, p, range, std::move(source), std::move(trail)});
  };

  const bool f_nonneg = gen.sign_class == SignClass::nonnegative ||
                        (gen.lower_bound && *gen.lower_bound >= 0.0);
  const bool f_nonpos = gen.sign_class == SignClass::nonpositive ||
                        (gen.upper_bound && *gen.upper_bound <= 0.0);
  const std::string nonneg_why = gen.sign_class == SignClass::nonnegative
                                     ? "generator.sign_class=nonnegative"
                                     : "generator.lower_bound>=0";
  const std::string nonpos_why = gen.sign_class == SignClass::nonpositive
                                     ? "generator.sign_class=nonpositive"
                                     : "generator.upper_bound<=0";

  if (m.uf_xi_in_L1 == true) {
    const std::string uf = why_uf_L1(meta);
    add(Conclusion::solution_exists_unique, "transform-integrability", {uf});

    if (D_bounded) add(Conclusion::Y_in_S_inf, "bounded-domain", {"D_bounded", uf});

    if (m.range_subset) {
      add(Conclusion::YZ_in_S_inf_H2BMO_with_range, "compact-range", {"range_subset"}, std::nullopt,
          m.range_subset);
    }

    auto moment_rule = [&](const std::optional<double>& part, const std::optional<double>& declared,
                           const char* part_name, bool strict_ok,
                           const std::string& strict_why, const char* strict_tag, bool sign_ok,
                           const std::string& sign_why, const char* sign_tag) {
      if (m.xi_in_L1 != true || !part) return;
      const double p = *part;
      const std::string xi1 = why_xi_L1(meta);
      const std::string pw = why_part(meta, declared, part_name, p);
      if (strict_ok) {
        if (p > 1.0) {
          add(Conclusion::YZ_in_Sp_H2p, strict_tag, {xi1, pw, strict_why, uf}, p);
        } else {
          add(Conclusion::YZ_in_Sr_H2, strict_tag, {xi1, pw, strict_why, uf}, 1.0);
        }
      }
      if (sign_ok && m.uf_xi_in_Lp) {
        const double pe = std::min(p, *m.uf_xi_in_Lp);
        const std::string uw = meta.uf_xi_in_Lp && *meta.uf_xi_in_Lp == *m.uf_xi_in_Lp
                                   ? "uf_xi_in_Lp=" + format_double(*m.uf_xi_in_Lp)
                                   : (meta.uf_xi_in_Linf ? "uf_xi_in_Linf" : "range_subset");
        if (pe > 1.0) {
          add(Conclusion::Y_in_Sp, sign_tag, {xi1, pw, uw, sign_why}, pe);
        } else {
          add(Conclusion::Y_in_Sr, sign_tag, {xi1, pw, uw, sign_why}, 1.0);
        }
      }
    };

    // A strictly positive lower bound is required; beta = 0 is not enough.
    const bool beta_pos = gen.lower_bound && *gen.lower_bound > 0.0;
    const bool beta_neg = gen.upper_bound && *gen.upper_bound < 0.0;
    moment_rule(m.xi_minus_in_Lp, meta.xi_minus_in_Lp, "xi_minus_in_Lp", beta_pos,
                beta_pos ? "generator.lower_bound=" + format_double(*gen.lower_bound) : "",
                "generator-bounded-below", f_nonneg, nonneg_why, "nonnegative-generator");
    moment_rule(m.xi_plus_in_Lp, meta.xi_plus_in_Lp, "xi_plus_in_Lp", beta_neg,
                beta_neg ? "generator.upper_bound=" + format_double(*gen.upper_bound) : "",
                "generator-bounded-above", f_nonpos, nonpos_why, "nonpositive-generator");
  }

  if (m.uf_xi_in_L1 == false) {
    // u_f bounded on one side makes u_f(xi) in L^1 necessary for any
    // solution.
    std::vector<std::string> trail{"uf_xi_in_L1=false"};
    bool bounded_side = false;
    if (V && (V->lower_finite() || V->upper_finite())) {
      bounded_side = true;
      trail.push_back(V->lower_finite() ? "V.lo=" + format_double(V->lo())
                                        : "V.hi=" + format_double(V->hi()));
    } else if (gen.lower_bound && *gen.lower_bound > 0.0 && !gen.domain.lower_finite()) {
      bounded_side = true;
      trail.push_back("generator.lower_bound=" + format_double(*gen.lower_bound));
    } else if (gen.upper_bound && *gen.upper_bound < 0.0 && !gen.domain.upper_finite()) {
      bounded_side = true;
      trail.push_back("generator.upper_bound=" + format_double(*gen.upper_bound));
    }
    if (bounded_side) add(Conclusion::necessary_L1_violated, "necessary-integrability", trail);
  }
  return rep;
}

bool SpaceReport::has(Conclusion c) const { return find(c) != nullptr; }

const ReportEntry* SpaceReport::find(Conclusion c) const {
  for (const auto& e : entries) {
    if (e.conclusion == c) return &e;
  }
  return nullptr;
}

bool SpaceReport::implies(const SpaceReport& weaker) const {
  for (const auto& w : weaker.entries) {
    const bool ok = std::any_of(entries.begin(), entries.end(),
                                [&](const ReportEntry& s) { return covers(s, w); });
    if (!ok) return false;
  }
  return true;
}

namespace {

std::string describe(const ReportEntry& e) {
  std::string s = to_string(e.conclusion);
  if (e.p) s += "(p=" + (std::isinf(*e.p) ? std::string("every") : format_double(*e.p)) + ")";
  if (e.y_range) s += "[" + format_double(e.y_range->lo) + ", " + format_double(e.y_range->hi) + "]";
  return s;
}

std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += v[i];
  }
  return out;
}

}  // namespace

std::string SpaceReport::to_text() const {
  std::ostringstream os;
  if (entries.empty()) os << "no conclusion follows from the declared metadata\n";
  for (const auto& e : entries) os << describe(e) << " | " << e.source << " | " << join(e.trail, ", ") << '\n';
  return os.str();
}

std::string SpaceReport::to_csv() const {
  std::ostringstream os;
  os << "conclusion,p,range_lo,range_hi,source,trail\n";
  for (const auto& e : entries) {
    os << to_string(e.conclusion) << ',' << (e.p ? format_double(*e.p) : "") << ','
       << (e.y_range ? format_double(e.y_range->lo) : "") << ','
       << (e.y_range ? format_double(e.y_range->hi) : "") << ',' << e.source << ','
       << join(e.trail, ";") << '\n';
  }
  return os.str();
}

TailDiagnostic check_necessary_condition(const Transform& t, std::span<const double> xi) {
  const OpenInterval& V = t.range();
  if (!V.lower_finite() && !V.upper_finite()) {
    throw InapplicableError("u_f is unbounded on both sides (V = " + to_string(V) +
                            "); the necessary integrability condition does not apply");
  }
  if (xi.empty()) throw ValidationError("no terminal samples supplied");
  std::vector<double> a;
  a.reserve(xi.size());
  double sum = 0.0;
  for (double x : xi) {
    if (!t.domain().contains(x)) {
      throw DomainError("terminal sample " + format_double(x) + " is outside D = " +
                        to_string(t.domain()));
    }
    const double v = t.u(x);
    sum += v;
    a.push_back(std::abs(v));
  }
  TailDiagnostic d;
  d.mean = sum / static_cast<double>(xi.size());
  const std::size_t n = a.size();
  const std::size_t k = std::max<std::size_t>(1, n / 20);
  d.tail_count = k;
  if (n < 2 || k >= n) {
    d.tail_index = kInf;
    return d;
  }
  // Top k+1 order statistics in descending order.
  std::partial_sort(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(k + 1), a.end(),
                    std::greater<>());
  const double xk = a[k];
  double h = 0.0;
  if (xk > 0.0) {
    for (std::size_t i = 0; i < k; ++i) h += std::log(a[i] / xk);
    h /= static_cast<double>(k);
  }
  d.tail_index = h > 0.0 ? 1.0 / h : kInf;
  d.verdict = d.tail_index <= 1.1 ? TailDiagnostic::Verdict::heavy_tail_warning
                                  : TailDiagnostic::Verdict::plausibly_L1;
  return d;
}

}  // namespace qbsde
