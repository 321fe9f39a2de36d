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

#ifndef DIP_TEST_UTIL_HH
#define DIP_TEST_UTIL_HH

#include "dip/packet.hpp"
#include "dip/rng.hpp"

namespace dip::test {

// Random but internally consistent packet (total_length matches payload).
inline Packet random_packet(Rng& rng) {
    Packet p;
    p.dscp = static_cast<std::uint8_t>(rng.next_below(64));
    p.ecn = static_cast<std::uint8_t>(rng.next_below(4));
    p.ip_id = static_cast<std::uint16_t>(rng.next_below(65536));
    p.dont_fragment = rng.next_below(2) == 1;
    p.more_fragments = rng.next_below(2) == 1;
    p.frag_offset = p.more_fragments || rng.next_below(2) == 1
                        ? static_cast<std::uint16_t>(rng.next_below(0x2000))
                        : 0;
    if (!p.more_fragments && rng.next_below(2) == 0)
        p.frag_offset = 0;
    p.ttl = static_cast<std::uint8_t>(1 + rng.next_below(255));
    p.protocol = static_cast<std::uint8_t>(rng.next_below(256));
    p.src = static_cast<Ipv4Addr>(rng.next_u64());
    p.dst = static_cast<Ipv4Addr>(rng.next_u64());
    std::size_t payload_len = rng.next_below(48);
    p.payload.resize(payload_len);
    for (auto& b : p.payload)
        b = static_cast<std::uint8_t>(rng.next_below(256));
    p.total_length = static_cast<std::uint16_t>(kHeaderBytes + payload_len);
    return p;
}

// DIP-marked packet with a payload that makes its digest unique.
inline Packet marked_packet(Ipv4Addr src, Ipv4Addr dst, std::uint8_t service_class,
                            Longevity longevity, std::uint32_t id,
                            std::size_t size_bytes = 100) {
    std::vector<std::uint8_t> payload(size_bytes - kHeaderBytes, 0);
    payload[0] = static_cast<std::uint8_t>(id >> 24);
    payload[1] = static_cast<std::uint8_t>(id >> 16);
    payload[2] = static_cast<std::uint8_t>(id >> 8);
    payload[3] = static_cast<std::uint8_t>(id);
    Packet p = make_packet(src, dst, std::move(payload));
    p.dscp = encode_dscp(DipMarking{service_class, longevity});
    p.ip_id = static_cast<std::uint16_t>(id & 0xffff);
    return p;
}

} // namespace dip::test

#endif
