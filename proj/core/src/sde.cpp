// Copyright 2026 The qbsde Authors
// SPDX-License-Identifier: Apache-2.0
#include "qbsde/sde.hpp"

#include <cmath>
#include <ostream>

#include "qbsde/errors.hpp"
#include "qbsde/parallel.hpp"
#include "qbsde/rng.hpp"

namespace qbsde {

const char* to_string(ExactLaw law) noexcept {
  switch (law) {
    case ExactLaw::brownian: return "brownian";
    case ExactLaw::scaled_brownian: return "scaled_brownian";
    case ExactLaw::geometric_brownian: return "geometric_brownian";
  }
  return "?";
}

ExactLaw parse_exact_law(const std::string& text) {
  if (text == "brownian") return ExactLaw::brownian;
  if (text == "scaled_brownian") return ExactLaw::scaled_brownian;
  if (text == "geometric_brownian") return ExactLaw::geometric_brownian;
  throw ConfigError("unknown law '" + text + "' (brownian, scaled_brownian, geometric_brownian)");
}

ForwardModel ForwardModel::brownian() {
  ForwardModel m;
  m.name = "brownian";
  m.drift = [](double, double) { return 0.0; };
  m.diffusion = [](double, double) { return 1.0; };
  m.lipschitz_declared = true;
  m.law = ExactLaw::brownian;
  return m;
}

ForwardModel ForwardModel::scaled_brownian(double mu, double sigma) {
  ForwardModel m;
  m.name = "scaled_brownian";
  m.drift = [mu](double, double) { return mu; };
  m.diffusion = [sigma](double, double) { return sigma; };
  m.lipschitz_declared = true;
  m.law = ExactLaw::scaled_brownian;
  m.mu = mu;
  m.sigma = sigma;
  return m;
}

ForwardModel ForwardModel::geometric_brownian(double mu, double sigma) {
  ForwardModel m;
  m.name = "geometric_brownian";
  m.drift = [mu](double, double x) { return mu * x; };
  m.diffusion = [sigma](double, double x) { return sigma * x; };
  m.lipschitz_declared = true;
  m.law = ExactLaw::geometric_brownian;
  m.mu = mu;
  m.sigma = sigma;
  return m;
}

void ForwardModel::transition(double tau, double& m, double& s) const {
  if (!law) throw ConfigError("forward model '" + name + "' has no exact transition law");
  switch (*law) {
    case ExactLaw::brownian:
      m = 0.0;
      s = std::sqrt(tau);
      return;
    case ExactLaw::scaled_brownian:
      m = mu * tau;
      s = std::abs(sigma) * std::sqrt(tau);
      return;
    case ExactLaw::geometric_brownian:
      m = (mu - 0.5 * sigma * sigma) * tau;
      s = std::abs(sigma) * std::sqrt(tau);
      return;
  }
}

std::vector<double> PathBundle::column(std::size_t k) const {
  std::vector<double> out(n_paths);
  for (std::size_t i = 0; i < n_paths; ++i) out[i] = x(i, k);
  return out;
}

PathBundle simulate(const ForwardModel& model, double t0, double x0, double T, std::size_t steps,
                    std::size_t n_paths, std::uint64_t seed, unsigned workers) {
  if (!(t0 < T)) throw PreconditionError("simulate: need t0 < T");
  if (steps < 1 || n_paths < 1) throw PreconditionError("simulate: need steps >= 1 and n_paths >= 1");
  if (!model.drift || !model.diffusion) throw ConfigError("simulate: model has no drift/diffusion");

  PathBundle b;
  b.seed = seed;
  b.n_paths = n_paths;
  b.times.resize(steps + 1);
  const double dt = (T - t0) / static_cast<double>(steps);
  for (std::size_t k = 0; k <= steps; ++k) b.times[k] = t0 + dt * static_cast<double>(k);
  b.times[steps] = T;
  b.states.resize(n_paths * (steps + 1));
  b.increments.resize(n_paths * steps);
  const double sq = std::sqrt(dt);

  parallel_for(n_paths, workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const NormalStream rng(seed, i);
      double* xs = b.states.data() + i * (steps + 1);
      double* db = b.increments.data() + i * steps;
      xs[0] = x0;
      std::array<double, 2> pair{};
      for (std::size_t k = 0; k < steps; ++k) {
        if (k % 2 == 0) pair = rng.pair(k / 2);
        db[k] = sq * pair[k % 2];
        const double t = b.times[k];
        const double mu = model.drift(t, xs[k]);
        const double sg = model.diffusion(t, xs[k]);
        if (!std::isfinite(mu) || !std::isfinite(sg))
          throw SimulationError("non-finite coefficient on path " + std::to_string(i) + " at step " +
                                std::to_string(k) + " (x = " + format_double(xs[k]) + ")");
        xs[k + 1] = xs[k] + mu * dt + sg * db[k];
        if (!std::isfinite(xs[k + 1]))
          throw SimulationError("state overflow on path " + std::to_string(i) + " at step " +
                                std::to_string(k + 1));
      }
    }
  });
  return b;
}

std::vector<std::size_t> first_exit(const PathBundle& bundle, const ClosedInterval& band) {
  const std::size_t m = bundle.steps();
  std::vector<std::size_t> out(bundle.n_paths, m);
  for (std::size_t i = 0; i < bundle.n_paths; ++i) {
    const auto r = bundle.row(i);
    for (std::size_t k = 0; k <= m; ++k) {
      if (!(band.lo < r[k] && r[k] < band.hi)) {
        out[i] = k;
        break;
      }
    }
  }
  return out;
}

void write_paths_csv(std::ostream& os, const PathBundle& bundle) {
  os << "path_id,step,t,x\n";
  for (std::size_t i = 0; i < bundle.n_paths; ++i)
    for (std::size_t k = 0; k <= bundle.steps(); ++k)
      os << i << ',' << k << ',' << format_double(bundle.times[k]) << ',' << format_double(bundle.x(i, k))
         << '\n';
}

}  // namespace qbsde
