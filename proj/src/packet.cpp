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

#include "dip/packet.hpp"

#include <cassert>
#include <string>

namespace dip {

const char* longevity_name(Longevity l) {
    switch (l) {
    case Longevity::Seconds: return "seconds";
    case Longevity::Minutes: return "minutes";
    case Longevity::Hours: return "hours";
    case Longevity::Days: return "days";
    }
    return "?";
}

std::optional<Longevity> longevity_from_name(const std::string& name) {
    if (name == "seconds") return Longevity::Seconds;
    if (name == "minutes") return Longevity::Minutes;
    if (name == "hours") return Longevity::Hours;
    if (name == "days") return Longevity::Days;
    return std::nullopt;
}

std::uint8_t encode_dscp(const DipMarking& marking) {
    assert(marking.service_class <= 7);
    return static_cast<std::uint8_t>((marking.service_class << 3) |
                                     (static_cast<std::uint8_t>(marking.longevity) << 1) | 1);
}

std::optional<DipMarking> decode_dscp(std::uint8_t dscp) {
    assert(dscp <= 63);
    if ((dscp & 1) == 0)
        return std::nullopt;
    DipMarking m;
    m.service_class = (dscp >> 3) & 0x7;
    m.longevity = static_cast<Longevity>((dscp >> 1) & 0x3);
    return m;
}

Packet make_packet(Ipv4Addr src, Ipv4Addr dst, std::vector<std::uint8_t> payload) {
    Packet p;
    p.src = src;
    p.dst = dst;
    p.total_length = static_cast<std::uint16_t>(kHeaderBytes + payload.size());
    p.payload = std::move(payload);
    return p;
}

const char* parse_error_name(ParseError e) {
    switch (e) {
    case ParseError::ShortBuffer: return "short buffer";
    case ParseError::BadVersion: return "bad version";
    case ParseError::BadHeaderLength: return "bad header length";
    case ParseError::BadChecksum: return "bad checksum";
    case ParseError::LengthMismatch: return "length mismatch";
    }
    return "?";
}

std::uint16_t header_checksum(std::span<const std::uint8_t> header) {
    assert(header.size() >= kHeaderBytes);
    std::uint32_t sum = 0;
    for (std::size_t i = 0; i < kHeaderBytes; i += 2) {
        if (i == 10) // checksum field itself
            continue;
        sum += (static_cast<std::uint32_t>(header[i]) << 8) | header[i + 1];
    }
    while (sum >> 16)
        sum = (sum & 0xffff) + (sum >> 16);
    return static_cast<std::uint16_t>(~sum & 0xffff);
}

std::vector<std::uint8_t> serialize(const Packet& p) {
    assert(p.version == 4 && p.header_len_words == 5);
    assert(p.dscp <= 63 && p.ecn <= 3 && p.frag_offset <= 0x1fff);
    assert(p.total_length == kHeaderBytes + p.payload.size());

    std::vector<std::uint8_t> out(kHeaderBytes + p.payload.size());
    out[0] = static_cast<std::uint8_t>((p.version << 4) | p.header_len_words);
    out[1] = static_cast<std::uint8_t>((p.dscp << 2) | p.ecn);
    out[2] = static_cast<std::uint8_t>(p.total_length >> 8);
    out[3] = static_cast<std::uint8_t>(p.total_length & 0xff);
    out[4] = static_cast<std::uint8_t>(p.ip_id >> 8);
    out[5] = static_cast<std::uint8_t>(p.ip_id & 0xff);
    std::uint16_t flags_frag = static_cast<std::uint16_t>(
        (p.dont_fragment ? 0x4000 : 0) | (p.more_fragments ? 0x2000 : 0) | p.frag_offset);
    out[6] = static_cast<std::uint8_t>(flags_frag >> 8);
    out[7] = static_cast<std::uint8_t>(flags_frag & 0xff);
    out[8] = p.ttl;
    out[9] = p.protocol;
    // out[10..11] checksum, filled below
    out[12] = static_cast<std::uint8_t>(p.src >> 24);
    out[13] = static_cast<std::uint8_t>(p.src >> 16);
    out[14] = static_cast<std::uint8_t>(p.src >> 8);
    out[15] = static_cast<std::uint8_t>(p.src);
    out[16] = static_cast<std::uint8_t>(p.dst >> 24);
    out[17] = static_cast<std::uint8_t>(p.dst >> 16);
    out[18] = static_cast<std::uint8_t>(p.dst >> 8);
    out[19] = static_cast<std::uint8_t>(p.dst);

    std::uint16_t cksum = header_checksum(out);
    out[10] = static_cast<std::uint8_t>(cksum >> 8);
    out[11] = static_cast<std::uint8_t>(cksum & 0xff);

    std::copy(p.payload.begin(), p.payload.end(), out.begin() + kHeaderBytes);
    return out;
}

std::variant<Packet, ParseError> parse_packet(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kHeaderBytes)
        return ParseError::ShortBuffer;
    std::uint8_t version = bytes[0] >> 4;
    if (version != 4)
        return ParseError::BadVersion;
    std::uint8_t ihl = bytes[0] & 0xf;
    if (ihl != 5)
        return ParseError::BadHeaderLength;

    std::uint16_t stored = (static_cast<std::uint16_t>(bytes[10]) << 8) | bytes[11];
    if (header_checksum(bytes) != stored)
        return ParseError::BadChecksum;

    Packet p;
    p.version = version;
    p.header_len_words = ihl;
    p.dscp = bytes[1] >> 2;
    p.ecn = bytes[1] & 0x3;
    p.total_length = (static_cast<std::uint16_t>(bytes[2]) << 8) | bytes[3];
    if (p.total_length != bytes.size() || p.total_length < kHeaderBytes)
        return ParseError::LengthMismatch;
    p.ip_id = (static_cast<std::uint16_t>(bytes[4]) << 8) | bytes[5];
    std::uint16_t flags_frag = (static_cast<std::uint16_t>(bytes[6]) << 8) | bytes[7];
    p.dont_fragment = (flags_frag & 0x4000) != 0;
    p.more_fragments = (flags_frag & 0x2000) != 0;
    p.frag_offset = flags_frag & 0x1fff;
    p.ttl = bytes[8];
    p.protocol = bytes[9];
    p.src = (static_cast<std::uint32_t>(bytes[12]) << 24) | (bytes[13] << 16) |
            (bytes[14] << 8) | bytes[15];
    p.dst = (static_cast<std::uint32_t>(bytes[16]) << 24) | (bytes[17] << 16) |
            (bytes[18] << 8) | bytes[19];
    p.payload.assign(bytes.begin() + kHeaderBytes, bytes.end());
    return p;
}

} // namespace dip
