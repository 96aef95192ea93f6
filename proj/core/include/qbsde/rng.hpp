// Copyright 2026 The qbsde Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>

namespace qbsde {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A block is
/// a pure function of (counter, key), so any (seed, path, step) cell can be
/// drawn independently of worker count or evaluation order.
namespace philox {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

Counter block(Counter ctr, Key key) noexcept;

}  // namespace philox

/// Standard normals keyed by (seed, stream, index). Stream is typically the
/// path id and index the time step; a second index word separates uses.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : seed_(seed), stream_(stream) {}

  /// Two independent N(0,1) draws for cell `index` (Box-Muller).
  std::array<double, 2> pair(std::uint64_t index, std::uint32_t purpose = 0) const noexcept;
  double operator()(std::uint64_t index, std::uint32_t purpose = 0) const noexcept {
    return pair(index, purpose)[0];
  }
  /// Uniform on (0, 1), never 0 or 1.
  double uniform(std::uint64_t index, std::uint32_t purpose = 0) const noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

/// splitmix64 finalizer, used to derive child seeds from a master seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept;

}  // namespace qbsde
