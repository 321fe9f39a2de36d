/*
 *    Copyright 2026 The DIP Authors
 *
 *    Licensed under the Apache License, Version 2.0 (the "License");
 *    you may not use this file except in compliance with the License.
 *    You may obtain a copy of the License at
 *
 *        http://www.apache.org/licenses/LICENSE-2.0
 *
 *    Unless required by applicable law or agreed to in writing, software
 *    distributed under the License is distributed on an "AS IS" BASIS,
 *    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *    See the License for the specific language governing permissions and
 *    limitations under the License.
 */

#ifndef DIP_RNG_HH
#define DIP_RNG_HH

#include <cstdint>

namespace dip {

// splitmix64 step; also used standalone as a cheap integer mixer.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic PRNG with a fixed algorithm (splitmix64). std::mt19937 would
// also be deterministic, but the distributions on top of it are not specified
// by the standard; we roll our own so reports are identical everywhere.
class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    // Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [0, n). n must be nonzero; modulo bias is irrelevant at the
    // sizes used here.
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

    // Independent child stream, stable under unrelated draws from the parent.
    Rng fork(std::uint64_t tag) const { return Rng(mix64(state_ ^ mix64(tag))); }

  private:
    std::uint64_t state_;
};

} // namespace dip

#endif
