// SPDX-License-Identifier: Apache-2.0
//
// fadestat - fading channel statistics toolkit
// Copyright (C) 2026 The fadestat authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef FADESTAT_RANDOM_HPP
#define FADESTAT_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace fadestat {

/// Seeded random stream. Substreams are derived from (seed, key) only, so a
/// replicate or burst keyed by its index draws the same numbers no matter
/// which thread runs it or in what order.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

  std::uint64_t seed() const noexcept { return seed_; }

  RandomStream substream(std::uint64_t key) const {
    return RandomStream(mix(seed_ ^ mix(key + 0x9e3779b97f4a7c15ULL)));
  }

  std::mt19937_64& engine() noexcept { return engine_; }

  /// Uniform on the open interval (0, 1).
  double uniform() {
    double u;
    do {
      u = std::generate_canonical<double, 64>(engine_);
    } while (u <= 0.0);
    return u;
  }

  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

  double gamma(double shape, double scale) {
    return std::gamma_distribution<double>(shape, scale)(engine_);
  }

  double exponential() { return -std::log(uniform()); }

 private:
  static std::uint64_t mix(std::uint64_t z) noexcept {
    // splitmix64 finalizer
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace fadestat

#endif  // FADESTAT_RANDOM_HPP
