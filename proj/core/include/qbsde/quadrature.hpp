// Copyright 2026 The qbsde Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace qbsde::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;

  bool converged(double rel_tol) const {
    return std::isfinite(value) && std::isfinite(error) &&
           error <= std::max({rel_tol * l1, 1e3 * rel_tol * rel_tol,
                                     128 * std::numeric_limits<double>::epsilon() * l1});
  }
};

namespace detail {

// One 21-point Gauss-Kronrod panel on [a, b] with a < b. Boost reports the
// error estimate on the reference interval [-1, 1]; it is rescaled here.
template <class F>
Result gk21(F& f, double a, double b) {
  Result r;
  double err = 0.0, l1 = 0.0;
  r.value = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, a, b, 0, 0.0, &err, &l1);
  r.error = err * 0.5 * (b - a);
  r.l1 = l1;
  return r;
}

}  // namespace detail

/// Globally adaptive 21-point Gauss-Kronrod on a finite [a, b] (a > b
/// allowed): the panel with the largest error estimate is bisected until the
/// summed error meets rel_tol or max_panels is reached. The panel cap keeps
/// integrands that are only accurate to a few digits (cancellation near a
/// singular endpoint) from exhausting the budget. Never throws; callers
/// inspect converged().
template <class F>
Result adaptive(F&& f, double a, double b, double rel_tol, unsigned max_panels = 2000) {
  if (a == b) return {};
  if (b < a) {
    Result r = adaptive(f, b, a, rel_tol, max_panels);
    r.value = -r.value;
    return r;
  }
  struct Panel {
    double a, b;
    Result r;
    bool operator<(const Panel& o) const { return r.error < o.r.error; }
  };
  const double eps = std::numeric_limits<double>::epsilon();
  Result total = detail::gk21(f, a, b);
  if (total.error <= std::max(rel_tol * total.l1, 64 * eps * std::abs(total.value))) return total;
  std::vector<Panel> heap;
  heap.push_back({a, b, total});
  while (heap.size() < max_panels) {
    if (!std::isfinite(total.value) || !std::isfinite(total.error)) break;
    if (total.error <= std::max(rel_tol * total.l1, 64 * eps * std::abs(total.value))) break;
    std::pop_heap(heap.begin(), heap.end());
    const Panel worst = heap.back();
    heap.pop_back();
    const double m = 0.5 * (worst.a + worst.b);
    if (!(m > worst.a && m < worst.b)) {
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end());
      break;
    }
    Panel left{worst.a, m, detail::gk21(f, worst.a, m)};
    Panel right{m, worst.b, detail::gk21(f, m, worst.b)};
    total.value += left.r.value + right.r.value - worst.r.value;
    total.error += left.r.error + right.r.error - worst.r.error;
    total.l1 += left.r.l1 + right.r.l1 - worst.r.l1;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end());
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end());
  }
  // Re-sum to shed the drift of the running updates.
  Result out;
  for (const Panel& p : heap) {
    out.value += p.r.value;
    out.error += p.r.error;
    out.l1 += p.r.l1;
  }
  return out;
}

/// Fixed 15-point Gauss-Legendre rule on [a, b]; intended for short panels
/// where the integrand is smooth.
template <class F>
double panel(F&& f, double a, double b) {
  if (a == b) return 0.0;
  return boost::math::quadrature::gauss<double, 15>::integrate(f, a, b);
}

/// Gauss-Hermite rule for the standard normal: E[h(N)] ~ sum_i w_i h(x_i).
struct NormalRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  template <class F>
  double expect(F&& h) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * h(nodes[i]);
    return s;
  }
};

/// Golub-Welsch construction for the probabilists' Hermite weight. Results
/// are cached per node count; the returned reference stays valid.
const NormalRule& gauss_hermite_normal(int n);

}  // namespace qbsde::quad
