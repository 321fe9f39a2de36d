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

#ifndef DIP_DIGEST_HH
#define DIP_DIGEST_HH

#include <cstdint>
#include <span>

#include "dip/packet.hpp"

namespace dip {

// 128-bit packet fingerprint. Wide enough that accidental collisions are a
// non-issue; the Bloom filter carries the false-positive budget instead.
struct Digest {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;

    bool operator==(const Digest&) const = default;
};

struct DigestHash {
    std::size_t operator()(const Digest& d) const {
        return static_cast<std::size_t>(d.hi ^ (d.lo * 0x9e3779b97f4a7c15ULL));
    }
};

// Per-node key; digests are deterministic per run but not forgeable across
// configurations.
struct DigestKey {
    std::uint64_t k0 = 0;
    std::uint64_t k1 = 0;
};

// SipHash-2-4 with 128-bit output.
Digest siphash128(const DigestKey& key, std::span<const std::uint8_t> data);

// Digest over the fields a router may not change in transit: version, header
// length, total length, id, flags, fragment offset, protocol, addresses, and
// the first eight payload bytes (zero padded). ttl/dscp/ecn/checksum are
// excluded so remarking and forwarding do not perturb duplicate detection.
Digest packet_digest(const Packet& p, const DigestKey& key);

} // namespace dip

#endif
