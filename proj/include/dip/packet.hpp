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

#ifndef DIP_PACKET_HH
#define DIP_PACKET_HH

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dip/addr.hpp"

namespace dip {

// Coarse at-rest lifetime categories carried in the DSCP longevity bits.
enum class Longevity : std::uint8_t {
    Seconds = 0,
    Minutes = 1,
    Hours = 2,
    Days = 3,
};

const char* longevity_name(Longevity l);
std::optional<Longevity> longevity_from_name(const std::string& name);

// DIP's use of the 6-bit DSCP: three service-class bits, two longevity bits,
// and a low bit fixed to 1 so every codepoint lands in the experimental pools
// (xxxx11 / xxxx01).
struct DipMarking {
    std::uint8_t service_class = 0; // 0..7
    Longevity longevity = Longevity::Seconds;

    bool operator==(const DipMarking&) const = default;
};

// Layout, MSB first:  [class:3][longevity:2][1].
std::uint8_t encode_dscp(const DipMarking& marking);

// nullopt means the codepoint is not a DIP marking; such packets are plain IP
// and are never parked.
std::optional<DipMarking> decode_dscp(std::uint8_t dscp);

// IPv4 datagram, header always 20 bytes (no options).
struct Packet {
    std::uint8_t version = 4;
    std::uint8_t header_len_words = 5;
    std::uint8_t dscp = 0; // 6 bits
    std::uint8_t ecn = 0;  // 2 bits
    std::uint16_t total_length = 20;
    std::uint16_t ip_id = 0;
    bool dont_fragment = false;
    bool more_fragments = false;
    std::uint16_t frag_offset = 0; // 13 bits, units of 8 bytes
    std::uint8_t ttl = 64;
    std::uint8_t protocol = 17;
    Ipv4Addr src = 0;
    Ipv4Addr dst = 0;
    std::vector<std::uint8_t> payload;

    bool is_fragment() const { return more_fragments || frag_offset != 0; }

    bool operator==(const Packet&) const = default;
};

// Builds a consistent packet: total_length derived from the payload.
Packet make_packet(Ipv4Addr src, Ipv4Addr dst, std::vector<std::uint8_t> payload);

constexpr std::size_t kHeaderBytes = 20;

enum class ParseError {
    ShortBuffer,
    BadVersion,
    BadHeaderLength,
    BadChecksum,
    LengthMismatch,
};

const char* parse_error_name(ParseError e);

// Wire format: RFC 791 field order, big endian, ones-complement header
// checksum filled in on serialize and verified on parse.
std::vector<std::uint8_t> serialize(const Packet& p);
std::variant<Packet, ParseError> parse_packet(std::span<const std::uint8_t> bytes);

// Ones-complement sum over the 20-byte header with the checksum field taken
// as zero. Exposed for the checksum tests.
std::uint16_t header_checksum(std::span<const std::uint8_t> header);

} // namespace dip

#endif
