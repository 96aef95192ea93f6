// Copyright 2026 The qbsde Authors
// SPDX-License-Identifier: Apache-2.0
#include "qbsde/quadrature.hpp"

#include <map>
#include <memory>
#include <mutex>

#include <Eigen/Eigenvalues>

#include "qbsde/errors.hpp"

namespace qbsde::quad {

namespace {

NormalRule build_rule(int n) {
  // Jacobi matrix of the monic probabilists' Hermite recurrence:
  // He_{k+1} = x He_k - k He_{k-1}.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(n - 1);
  for (int k = 1; k < n; ++k) sub(k - 1) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw NumericalError("Gauss-Hermite eigensolve failed");
  NormalRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    r.weights[i] = v0 * v0;
    total += r.weights[i];
  }
  for (double& w : r.weights) w /= total;
  // Symmetrize so that odd moments vanish to rounding.
  for (int i = 0; i < n / 2; ++i) {
    const int j = n - 1 - i;
    const double x = 0.5 * (r.nodes[j] - r.nodes[i]);
    const double w = 0.5 * (r.weights[i] + r.weights[j]);
    r.nodes[i] = -x;
    r.nodes[j] = x;
    r.weights[i] = r.weights[j] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

}  // namespace

const NormalRule& gauss_hermite_normal(int n) {
  if (n < 1 || n > 512) throw ConfigError("Gauss-Hermite node count must be in [1, 512]");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<NormalRule>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<NormalRule>(n == 1 ? NormalRule{{0.0}, {1.0}} : build_rule(n));
  return *slot;
}

}  // namespace qbsde::quad
