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

#include <vector>

#include "doctest.h"

#include "dip/dupfilter.hpp"
#include "dip/rng.hpp"

using namespace dip;

namespace {

Digest random_digest(Rng& rng) {
    return Digest{rng.next_u64(), rng.next_u64()};
}

} // namespace

TEST_CASE("dimension evaluates the standard sizing formulas") {
    auto p = dimension(1000, 0.01);
    CHECK(p.m == 9586);
    CHECK(p.k == 7);

    p = dimension(1, 0.5);
    CHECK(p.m == 2);
    CHECK(p.k == 1);

    p = dimension(100, 0.01);
    CHECK(p.m == 959);
    CHECK(p.k == 7);
}

TEST_CASE("dimension rejects bad parameters") {
    CHECK_THROWS_AS(dimension(0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(dimension(10, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(dimension(10, 1.0), std::invalid_argument);
}

TEST_CASE("inserted digests are always found; the empty filter finds nothing") {
    Rng rng(3);
    auto f = CountingBloomFilter::with_capacity(100, 0.01);
    Digest d = random_digest(rng);
    CHECK_FALSE(f.contains(d));
    f.insert(d);
    CHECK(f.contains(d));
    CHECK(f.live_count() == 1);
    CHECK(f.remove(d));
    CHECK_FALSE(f.contains(d));
    CHECK_FALSE(f.remove(d));
    CHECK(f.live_count() == 0);
}

TEST_CASE("no false negatives for live digests") {
    Rng rng(5);
    auto f = CountingBloomFilter::with_capacity(500, 0.01);
    std::vector<Digest> live;
    for (int i = 0; i < 500; ++i) {
        live.push_back(random_digest(rng));
        f.insert(live.back());
    }
    for (const Digest& d : live)
        CHECK(f.contains(d));
}

TEST_CASE("interleaved insert/remove leaves counters equal to a fresh rebuild") {
    Rng rng(9);
    auto f = CountingBloomFilter::with_capacity(200, 0.02);
    std::vector<Digest> pool;
    for (int i = 0; i < 100; ++i)
        pool.push_back(random_digest(rng));

    std::vector<Digest> live;
    for (int step = 0; step < 600; ++step) {
        if (!live.empty() && rng.next_below(2) == 0) {
            std::size_t pick = rng.next_below(live.size());
            CHECK(f.remove(live[pick]));
            live.erase(live.begin() + static_cast<std::ptrdiff_t>(pick));
        } else {
            const Digest& d = pool[rng.next_below(pool.size())];
            f.insert(d);
            live.push_back(d);
        }
    }

    auto rebuilt = CountingBloomFilter::with_capacity(200, 0.02);
    for (const Digest& d : live)
        rebuilt.insert(d);
    REQUIRE(f.live_count() == rebuilt.live_count());
    auto a = f.counters();
    auto b = rebuilt.counters();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a[i] == b[i]);
}

TEST_CASE("balanced removal returns every counter to zero") {
    Rng rng(13);
    auto f = CountingBloomFilter::with_capacity(1000, 0.01);
    std::vector<Digest> live;
    for (int i = 0; i < 1000; ++i) {
        live.push_back(random_digest(rng));
        f.insert(live.back());
    }
    for (const Digest& d : live)
        CHECK(f.remove(d));
    for (std::uint8_t c : f.counters())
        CHECK(c == 0);
    CHECK_FALSE(f.overflowed());
}

TEST_CASE("measured false-positive rate stays near the analytic value") {
    Rng rng(17);
    auto f = CountingBloomFilter::with_capacity(1000, 0.01);
    for (int i = 0; i < 1000; ++i)
        f.insert(random_digest(rng));

    int fp = 0;
    const int probes = 20000;
    for (int i = 0; i < probes; ++i)
        if (f.contains(random_digest(rng)))
            ++fp;
    double rate = static_cast<double>(fp) / probes;
    CHECK(rate <= 2.0 * 0.01);       // twice the dimensioning target
    CHECK(f.analytic_fpr() < 0.012); // sanity on the analytic formula itself
}

TEST_CASE("counters saturate instead of wrapping") {
    CountingBloomFilter f(4, 2); // tiny: forced collisions
    Rng rng(21);
    Digest d = random_digest(rng);
    for (int i = 0; i < 300; ++i)
        f.insert(d);
    CHECK(f.overflowed());
    CHECK(f.contains(d));
}
