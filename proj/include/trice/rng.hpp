// SPDX-License-Identifier: Apache-2.0
//
// trice: two-stage channel estimation for RIS-aided mmWave MIMO systems
// Copyright (C) 2026 the trice authors
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

#ifndef TRICE_RNG_HPP
#define TRICE_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include "trice/numkit.hpp"

namespace trice {

/// splitmix64 finalizer; stable across platforms.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
    return splitmix64(seed ^ splitmix64(value));
}

/// Seeded random source. The distribution transforms are implemented by
/// hand (not via std:: distributions) so that a given seed produces the
/// same stream on every standard library.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal pair via Box-Muller.
    std::pair<double, double> normal_pair() {
        const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * M_PI * u2;
        return {r * std::cos(t), r * std::sin(t)};
    }

    /// Circularly-symmetric complex normal CN(0, variance).
    Complex complex_normal(double variance = 1.0) {
        auto [x, y] = normal_pair();
        const double s = std::sqrt(variance / 2.0);
        return {s * x, s * y};
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace trice

#endif  // TRICE_RNG_HPP
