// Copyright 2026 The qbsde Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qbsde/generator.hpp"
#include "qbsde/interval.hpp"

namespace qbsde {

class Transform;

/// Declared integrability facts about the terminal value xi. Nothing here is
/// inferred from data; unset optionals mean "not declared".
struct TerminalMeta {
  std::optional<ClosedInterval> range_subset;
  std::optional<double> lower_bound_const;  // zeta with xi >= zeta
  std::optional<bool> xi_in_L1;
  std::optional<double> xi_in_Lp;
  std::optional<double> xi_minus_in_Lp;
  std::optional<double> xi_plus_in_Lp;
  std::optional<bool> uf_xi_in_L1;
  std::optional<double> uf_xi_in_Lp;
  bool uf_xi_in_Linf = false;
};

enum class Conclusion {
  solution_exists_unique,
  Y_in_S_inf,
  YZ_in_S_inf_H2BMO_with_range,
  YZ_in_Sp_H2p,
  YZ_in_Sr_H2,
  Y_in_Sp,
  Y_in_Sr,
  necessary_L1_violated,
};

const char* to_string(Conclusion c) noexcept;

struct ReportEntry {
  Conclusion conclusion;
  std::optional<double> p;                 // exponent for the S^p families
  std::optional<ClosedInterval> y_range;   // for the compact-range case
  std::string source;                      // rule tag
  std::vector<std::string> trail;          // declared fields used
};

struct SpaceReport {
  std::vector<ReportEntry> entries;

  bool has(Conclusion c) const;
  const ReportEntry* find(Conclusion c) const;
  /// True if every guarantee in `weaker` is matched or strengthened here
  /// (e.g. S^3 covers S^2, and S^p with p > 1 covers S^r for r < 1).
  bool implies(const SpaceReport& weaker) const;
  /// One line per conclusion: tag | rule | trail.
  std::string to_text() const;
  /// Header conclusion,p,range_lo,range_hi,source,trail.
  std::string to_csv() const;
};

/// Emits every conclusion whose full hypothesis set follows from the
/// declarations. `V` (the range of u_f), when known, lets the necessary
/// integrability condition fire for generators without declared bounds.
/// Throws ValidationError on inconsistent metadata.
SpaceReport classify(const Generator& gen, const TerminalMeta& meta, bool D_bounded,
                     const std::optional<OpenInterval>& V = std::nullopt);

/// Normalized copy of the metadata (implied memberships filled in);
/// throws ValidationError on contradictions.
TerminalMeta normalize(const TerminalMeta& meta, const OpenInterval& D);

struct TailDiagnostic {
  enum class Verdict { plausibly_L1, heavy_tail_warning };
  double mean = 0.0;           // empirical mean of u_f(xi)
  double tail_index = 0.0;     // Hill estimate for |u_f(xi)|; inf if no tail
  std::size_t tail_count = 0;  // order statistics used
  Verdict verdict = Verdict::plausibly_L1;
};

const char* to_string(TailDiagnostic::Verdict v) noexcept;

/// Empirical look at whether u_f(xi) is integrable: mean plus a Hill tail
/// index on the top 5% of |u_f(xi)|; warns when the index is <= 1.1.
/// Purely diagnostic. Throws InapplicableError when u_f is unbounded on
/// both sides and DomainError for samples outside D.
TailDiagnostic check_necessary_condition(const Transform& t, std::span<const double> xi_samples);

}  // namespace qbsde
