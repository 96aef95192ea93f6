// Copyright 2026 The qbsde Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qbsde/interval.hpp"

namespace qbsde {

using TimeStateFn = std::function<double(double t, double x)>;

/// Forward laws with a closed-form transition density.
///   brownian            dX = dB
///   scaled_brownian     dX = mu dt + sigma dB
///   geometric_brownian  dX = mu X dt + sigma X dB
enum class ExactLaw { brownian, scaled_brownian, geometric_brownian };

const char* to_string(ExactLaw law) noexcept;
ExactLaw parse_exact_law(const std::string& text);

/// dX = b(t, X) dt + sigma(t, X) dB in one dimension.
struct ForwardModel {
  std::string name = "custom";
  TimeStateFn drift;
  TimeStateFn diffusion;
  int dimension = 1;
  bool lipschitz_declared = false;
  /// Set by the factories below; user-built models have no exact law.
  std::optional<ExactLaw> law;
  double mu = 0.0;
  double sigma = 1.0;

  static ForwardModel brownian();
  static ForwardModel scaled_brownian(double mu, double sigma);
  static ForwardModel geometric_brownian(double mu, double sigma);
  /// Conditional mean and standard deviation of the Gaussian driving X_T
  /// given X_t = x: X_T = x + m + s N (additive laws) or
  /// X_T = x exp(m + s N) (geometric). Requires an exact law.
  void transition(double tau, double& m, double& s) const;
};

/// Euler paths on a uniform grid, stored row-major (one row per path).
struct PathBundle {
  std::vector<double> times;       // m + 1 points
  std::size_t n_paths = 0;
  std::vector<double> states;      // N x (m + 1)
  std::vector<double> increments;  // N x m Brownian increments
  std::uint64_t seed = 0;

  std::size_t steps() const noexcept { return times.empty() ? 0 : times.size() - 1; }
  double dt() const noexcept { return times.size() < 2 ? 0.0 : times[1] - times[0]; }
  double x(std::size_t path, std::size_t k) const { return states[path * (steps() + 1) + k]; }
  double dB(std::size_t path, std::size_t k) const { return increments[path * steps() + k]; }
  std::span<const double> row(std::size_t path) const {
    return {states.data() + path * (steps() + 1), steps() + 1};
  }
  /// States of all paths at grid index k.
  std::vector<double> column(std::size_t k) const;
};

/// Euler-Maruyama: X_{k+1} = X_k + b(s_k, X_k) D + sigma(s_k, X_k) dB_k.
/// The increment of (path, step) depends only on (seed, path, step), so two
/// models simulated with the same seed share their increments exactly.
/// Throws PreconditionError on bad sizes and SimulationError naming the
/// path and step on a non-finite coefficient.
PathBundle simulate(const ForwardModel& model, double t0, double x0, double T, std::size_t steps,
                    std::size_t n_paths, std::uint64_t seed, unsigned workers = 1);

/// Per path, the first grid index whose state is outside the open band
/// (lo, hi), or steps() if the path never leaves.
std::vector<std::size_t> first_exit(const PathBundle& bundle, const ClosedInterval& band);

/// path_id,step,t,x
void write_paths_csv(std::ostream& os, const PathBundle& bundle);

}  // namespace qbsde
