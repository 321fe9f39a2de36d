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

#ifndef DIP_DUPFILTER_HH
#define DIP_DUPFILTER_HH

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#ifndef NDEBUG
#include <unordered_map>
#endif

#include "dip/digest.hpp"

namespace dip {

struct BloomParams {
    std::size_t m = 0; // counters
    int k = 0;         // hash functions
};

// Standard sizing: m = ceil(-n ln p / (ln 2)^2), k = round((m/n) ln 2).
// Throws std::invalid_argument for capacity < 1 or p outside (0, 1).
BloomParams dimension(std::size_t capacity, double target_fpr);

// Counting Bloom filter over packet digests. Deletion-capable so membership
// tracks only the packets currently parked. Counters are 8-bit and saturate
// rather than wrap; saturation latches `overflowed` since a saturated counter
// can no longer be decremented reliably.
class CountingBloomFilter {
  public:
    CountingBloomFilter(std::size_t m, int k);
    static CountingBloomFilter with_capacity(std::size_t capacity, double target_fpr);

    void insert(const Digest& d);
    // Decrements the digest's counters. Returns false (and changes nothing)
    // when the digest is definitely absent. Callers are expected to remove
    // only digests they inserted; a debug-build shadow map enforces that.
    bool remove(const Digest& d);
    bool contains(const Digest& d) const;

    std::size_t live_count() const { return n_live_; }
    bool overflowed() const { return overflowed_; }
    std::span<const std::uint8_t> counters() const { return counters_; }
    std::size_t m() const { return counters_.size(); }
    int k() const { return k_; }

    // Expected false-positive probability at the current load.
    double analytic_fpr() const;

  private:
    std::size_t index(const Digest& d, int i) const;

    std::vector<std::uint8_t> counters_;
    int k_;
    std::size_t n_live_ = 0;
    bool overflowed_ = false;
#ifndef NDEBUG
    std::unordered_map<Digest, std::size_t, DigestHash> shadow_;
#endif
};

} // namespace dip

#endif
