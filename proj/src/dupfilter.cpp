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

#include "dip/dupfilter.hpp"

#include <cassert>
#include <cmath>

namespace dip {

BloomParams dimension(std::size_t capacity, double target_fpr) {
    if (capacity < 1)
        throw std::invalid_argument("bloom capacity must be >= 1");
    if (!(target_fpr > 0.0) || !(target_fpr < 1.0))
        throw std::invalid_argument("bloom target_fpr must be in (0, 1)");
    const double ln2 = std::log(2.0);
    double m = std::ceil(-static_cast<double>(capacity) * std::log(target_fpr) / (ln2 * ln2));
    BloomParams p;
    p.m = static_cast<std::size_t>(m);
    long k = std::lround(m / static_cast<double>(capacity) * ln2);
    p.k = k < 1 ? 1 : static_cast<int>(k);
    return p;
}

CountingBloomFilter::CountingBloomFilter(std::size_t m, int k)
    : counters_(m, 0), k_(k) {
    if (m < 1 || k < 1)
        throw std::invalid_argument("bloom filter needs m >= 1 and k >= 1");
}

CountingBloomFilter CountingBloomFilter::with_capacity(std::size_t capacity,
                                                       double target_fpr) {
    BloomParams p = dimension(capacity, target_fpr);
    return CountingBloomFilter(p.m, p.k);
}

std::size_t CountingBloomFilter::index(const Digest& d, int i) const {
    // Double hashing off the two digest halves; forcing h2 odd avoids the
    // degenerate stride when hi % m == 0.
    std::uint64_t h1 = d.lo;
    std::uint64_t h2 = d.hi | 1;
    return static_cast<std::size_t>((h1 + static_cast<std::uint64_t>(i) * h2) %
                                    counters_.size());
}

void CountingBloomFilter::insert(const Digest& d) {
    for (int i = 0; i < k_; ++i) {
        std::uint8_t& c = counters_[index(d, i)];
        if (c == 0xff)
            overflowed_ = true;
        else
            ++c;
    }
    ++n_live_;
#ifndef NDEBUG
    ++shadow_[d];
#endif
}

bool CountingBloomFilter::remove(const Digest& d) {
    if (!contains(d))
        return false;
#ifndef NDEBUG
    auto it = shadow_.find(d);
    assert(it != shadow_.end() && "remove of never-inserted digest");
    if (it != shadow_.end() && --it->second == 0)
        shadow_.erase(it);
#endif
    for (int i = 0; i < k_; ++i) {
        std::uint8_t& c = counters_[index(d, i)];
        if (c == 0xff)
            continue; // saturated; cannot safely decrement
        assert(c > 0);
        if (c > 0)
            --c;
    }
    assert(n_live_ > 0);
    --n_live_;
    return true;
}

bool CountingBloomFilter::contains(const Digest& d) const {
    for (int i = 0; i < k_; ++i)
        if (counters_[index(d, i)] == 0)
            return false;
    return true;
}

double CountingBloomFilter::analytic_fpr() const {
    double exponent = -static_cast<double>(k_) * static_cast<double>(n_live_) /
                      static_cast<double>(counters_.size());
    return std::pow(1.0 - std::exp(exponent), k_);
}

} // namespace dip
