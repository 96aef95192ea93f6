#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "qbsde/errors.hpp"
#include "qbsde/rng.hpp"
#include "qbsde/sde.hpp"

using namespace qbsde;

TEST(Philox, KnownAnswer) {
  // Random123 reference vector for philox4x32-10 with all-ones input.
  const auto out = philox::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out[0], 0x408f276du);
  EXPECT_EQ(out[1], 0x41c83b0eu);
  EXPECT_EQ(out[2], 0xa20bc7c6u);
  EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(Simulate, BrownianTerminalVariance) {
  const std::size_t N = 20000;
  const PathBundle b = simulate(ForwardModel::brownian(), 0.25, 0.0, 1.25, 10, N, 42);
  double s = 0, s2 = 0;
  for (std::size_t i = 0; i < N; ++i) {
    s += b.x(i, 10);
    s2 += b.x(i, 10) * b.x(i, 10);
  }
  const double var = s2 / N - (s / N) * (s / N);
  EXPECT_NEAR(var, 1.0, 4.0 / std::sqrt(double(N)));
  EXPECT_DOUBLE_EQ(b.times.front(), 0.25);
  EXPECT_DOUBLE_EQ(b.times.back(), 1.25);
}

TEST(Simulate, ZeroDiffusionIsConstant) {
  ForwardModel m;
  m.drift = [](double, double) { return 0.0; };
  m.diffusion = [](double, double) { return 0.0; };
  const PathBundle b = simulate(m, 0, 3.5, 1, 7, 50, 1);
  for (double x : b.states) EXPECT_EQ(x, 3.5);
}

TEST(Simulate, WorkerCountDoesNotChangePaths) {
  const auto m = ForwardModel::geometric_brownian(0.05, 0.3);
  const PathBundle a = simulate(m, 0, 1, 1, 16, 999, 9, 1);
  const PathBundle b = simulate(m, 0, 1, 1, 16, 999, 9, 4);
  EXPECT_EQ(a.states, b.states);
  EXPECT_EQ(a.increments, b.increments);
}

TEST(Simulate, SameSeedSharesIncrements) {
  const PathBundle a = simulate(ForwardModel::brownian(), 0, 0, 1, 8, 100, 5);
  const PathBundle b = simulate(ForwardModel::scaled_brownian(0.3, 2.0), 0, 1, 1, 8, 100, 5);
  EXPECT_EQ(a.increments, b.increments);
  const PathBundle c = simulate(ForwardModel::brownian(), 0, 0, 1, 8, 100, 6);
  EXPECT_NE(a.increments, c.increments);
}

TEST(Simulate, WeakEulerError) {
  // E[cos(X_T)] = exp(-T/2) for Brownian X started at 0.
  const std::size_t N = 40000;
  const PathBundle b = simulate(ForwardModel::brownian(), 0, 0, 1, 20, N, 3);
  double s = 0, s2 = 0;
  for (std::size_t i = 0; i < N; ++i) {
    const double v = std::cos(b.x(i, 20));
    s += v;
    s2 += v * v;
  }
  const double mean = s / N, se = std::sqrt((s2 / N - mean * mean) / N);
  EXPECT_LE(std::abs(mean - std::exp(-0.5)), 0.05 + 3 * se);
}

TEST(Simulate, Errors) {
  ForwardModel bad;
  bad.drift = [](double, double x) { return x > 2 ? std::numeric_limits<double>::quiet_NaN() : 1.0; };
  bad.diffusion = [](double, double) { return 0.0; };
  try {
    simulate(bad, 0, 0, 4, 4, 3, 1);
    FAIL() << "expected SimulationError";
  } catch (const SimulationError& e) {
    EXPECT_NE(std::string(e.what()).find("step"), std::string::npos) << e.what();
  }
  EXPECT_THROW(simulate(ForwardModel::brownian(), 0, 0, 1, 0, 3, 1), PreconditionError);
  EXPECT_THROW(simulate(ForwardModel::brownian(), 1, 0, 1, 4, 3, 1), PreconditionError);
}

TEST(FirstExit, Basics) {
  ForwardModel still;
  still.drift = [](double, double) { return 0.0; };
  still.diffusion = [](double, double) { return 0.0; };
  const PathBundle inside = simulate(still, 0, 0, 1, 5, 4, 1);
  for (auto k : first_exit(inside, {-1, 1})) EXPECT_EQ(k, 5u);
  const PathBundle outside = simulate(still, 0, 2, 1, 5, 4, 1);
  for (auto k : first_exit(outside, {-1, 1})) EXPECT_EQ(k, 0u);
}

TEST(FirstExit, MedianShrinksWithBand) {
  const PathBundle b = simulate(ForwardModel::brownian(), 0, 0, 1, 200, 4000, 17);
  double prev = 1e9;
  for (double K : {1.0, 0.5, 0.2, 0.05, 0.005}) {
    auto idx = first_exit(b, {-K, K});
    std::nth_element(idx.begin(), idx.begin() + idx.size() / 2, idx.end());
    const double med = static_cast<double>(idx[idx.size() / 2]);
    EXPECT_LE(med, prev) << K;
    prev = med;
  }
  EXPECT_LE(prev, 1.0);
}

TEST(Paths, CsvHeader) {
  const PathBundle b = simulate(ForwardModel::brownian(), 0, 0, 1, 2, 2, 1);
  std::ostringstream os;
  write_paths_csv(os, b);
  const std::string text = os.str();
  EXPECT_EQ(text.rfind("path_id,step,t,x\n", 0), 0u);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 2 * 3);
}
