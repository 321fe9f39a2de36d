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

#include "dip/digest.hpp"

#include <array>
#include <cstring>

namespace dip {

namespace {

inline std::uint64_t rotl(std::uint64_t x, int b) {
    return (x << b) | (x >> (64 - b));
}

inline std::uint64_t load_le64(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i)
        v = (v << 8) | p[i];
    return v;
}

struct SipState {
    std::uint64_t v0, v1, v2, v3;

    void round() {
        v0 += v1; v1 = rotl(v1, 13); v1 ^= v0; v0 = rotl(v0, 32);
        v2 += v3; v3 = rotl(v3, 16); v3 ^= v2;
        v0 += v3; v3 = rotl(v3, 21); v3 ^= v0;
        v2 += v1; v1 = rotl(v1, 17); v1 ^= v2; v2 = rotl(v2, 32);
    }
};

} // namespace

Digest siphash128(const DigestKey& key, std::span<const std::uint8_t> data) {
    SipState s;
    s.v0 = 0x736f6d6570736575ULL ^ key.k0;
    s.v1 = 0x646f72616e646f6dULL ^ key.k1;
    s.v2 = 0x6c7967656e657261ULL ^ key.k0;
    s.v3 = 0x7465646279746573ULL ^ key.k1;
    s.v1 ^= 0xee; // 128-bit output variant

    const std::size_t len = data.size();
    const std::size_t blocks = len / 8;
    for (std::size_t i = 0; i < blocks; ++i) {
        std::uint64_t m = load_le64(data.data() + i * 8);
        s.v3 ^= m;
        s.round();
        s.round();
        s.v0 ^= m;
    }

    std::uint64_t last = static_cast<std::uint64_t>(len & 0xff) << 56;
    for (std::size_t i = blocks * 8; i < len; ++i)
        last |= static_cast<std::uint64_t>(data[i]) << (8 * (i - blocks * 8));
    s.v3 ^= last;
    s.round();
    s.round();
    s.v0 ^= last;

    s.v2 ^= 0xee;
    for (int i = 0; i < 4; ++i)
        s.round();
    std::uint64_t lo = s.v0 ^ s.v1 ^ s.v2 ^ s.v3;

    s.v1 ^= 0xdd;
    for (int i = 0; i < 4; ++i)
        s.round();
    std::uint64_t hi = s.v0 ^ s.v1 ^ s.v2 ^ s.v3;

    return Digest{hi, lo};
}

Digest packet_digest(const Packet& p, const DigestKey& key) {
    // Canonical 25-byte layout of the covered fields.
    std::array<std::uint8_t, 25> buf{};
    buf[0] = static_cast<std::uint8_t>((p.version << 4) | p.header_len_words);
    buf[1] = static_cast<std::uint8_t>(p.total_length >> 8);
    buf[2] = static_cast<std::uint8_t>(p.total_length & 0xff);
    buf[3] = static_cast<std::uint8_t>(p.ip_id >> 8);
    buf[4] = static_cast<std::uint8_t>(p.ip_id & 0xff);
    buf[5] = static_cast<std::uint8_t>((p.dont_fragment ? 2 : 0) | (p.more_fragments ? 1 : 0));
    buf[6] = static_cast<std::uint8_t>(p.frag_offset >> 8);
    buf[7] = static_cast<std::uint8_t>(p.frag_offset & 0xff);
    buf[8] = p.protocol;
    buf[9] = static_cast<std::uint8_t>(p.src >> 24);
    buf[10] = static_cast<std::uint8_t>(p.src >> 16);
    buf[11] = static_cast<std::uint8_t>(p.src >> 8);
    buf[12] = static_cast<std::uint8_t>(p.src);
    buf[13] = static_cast<std::uint8_t>(p.dst >> 24);
    buf[14] = static_cast<std::uint8_t>(p.dst >> 16);
    buf[15] = static_cast<std::uint8_t>(p.dst >> 8);
    buf[16] = static_cast<std::uint8_t>(p.dst);
    const std::size_t n = p.payload.size() < 8 ? p.payload.size() : 8;
    for (std::size_t i = 0; i < n; ++i)
        buf[17 + i] = p.payload[i];
    // bytes past the payload stay zero
    return siphash128(key, buf);
}

} // namespace dip
