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

#include "doctest.h"

#include "dip/digest.hpp"
#include "dip/packet.hpp"
#include "test_util.hpp"

using namespace dip;

TEST_CASE("dscp codec encodes class and longevity with the low bit set") {
    CHECK(encode_dscp({0, Longevity::Seconds}) == 1);
    CHECK(encode_dscp({7, Longevity::Days}) == 63);
    CHECK(encode_dscp({3, Longevity::Minutes}) == 27); // 011|01|1
}

TEST_CASE("dscp codec decodes DIP codepoints and classifies the rest as plain IP") {
    auto m1 = decode_dscp(1);
    REQUIRE(m1.has_value());
    CHECK(m1->service_class == 0);
    CHECK(m1->longevity == Longevity::Seconds);

    auto m63 = decode_dscp(63);
    REQUIRE(m63.has_value());
    CHECK(m63->service_class == 7);
    CHECK(m63->longevity == Longevity::Days);

    CHECK_FALSE(decode_dscp(0b101110).has_value()); // 46, LSB clear
}

TEST_CASE("dscp codec round-trips all 32 markings; every even codepoint is non-DIP") {
    int dip_codepoints = 0;
    for (int cls = 0; cls <= 7; ++cls) {
        for (int lg = 0; lg <= 3; ++lg) {
            DipMarking m{static_cast<std::uint8_t>(cls), static_cast<Longevity>(lg)};
            std::uint8_t dscp = encode_dscp(m);
            CHECK((dscp & 1) == 1);
            auto back = decode_dscp(dscp);
            REQUIRE(back.has_value());
            CHECK(*back == m);
            ++dip_codepoints;
        }
    }
    CHECK(dip_codepoints == 32);
    for (int dscp = 0; dscp <= 63; dscp += 2)
        CHECK_FALSE(decode_dscp(static_cast<std::uint8_t>(dscp)).has_value());
}

namespace {

// Independent checksum oracle: the ones-complement sum of all ten header
// words, checksum included, must be 0xffff for a valid header.
bool checksum_oracle_ok(const std::vector<std::uint8_t>& wire) {
    std::uint32_t sum = 0;
    for (std::size_t i = 0; i < kHeaderBytes; i += 2) {
        sum += (static_cast<std::uint32_t>(wire[i]) << 8) | wire[i + 1];
        while (sum >> 16)
            sum = (sum & 0xffff) + (sum >> 16);
    }
    return sum == 0xffff;
}

} // namespace

TEST_CASE("serialize emits a header that passes an independent checksum oracle") {
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        Packet p = test::random_packet(rng);
        auto wire = serialize(p);
        REQUIRE(wire.size() == p.total_length);
        CHECK(checksum_oracle_ok(wire));
    }
}

TEST_CASE("serialize/parse round-trip identity on randomized packets") {
    Rng rng(11);
    for (int i = 0; i < 500; ++i) {
        Packet p = test::random_packet(rng);
        auto parsed = parse_packet(serialize(p));
        REQUIRE(std::holds_alternative<Packet>(parsed));
        CHECK(std::get<Packet>(parsed) == p);
    }
}

TEST_CASE("parse rejects malformed headers") {
    Packet p = test::marked_packet(1, 2, 3, Longevity::Hours, 42);
    auto wire = serialize(p);

    SUBCASE("short buffer") {
        std::vector<std::uint8_t> short_buf(wire.begin(), wire.begin() + 19);
        auto r = parse_packet(short_buf);
        REQUIRE(std::holds_alternative<ParseError>(r));
        CHECK(std::get<ParseError>(r) == ParseError::ShortBuffer);
    }
    SUBCASE("bad version") {
        auto bad = wire;
        bad[0] = (6 << 4) | 5;
        auto r = parse_packet(bad);
        REQUIRE(std::holds_alternative<ParseError>(r));
        CHECK(std::get<ParseError>(r) == ParseError::BadVersion);
    }
    SUBCASE("corrupted byte fails the checksum") {
        auto bad = wire;
        bad[8] ^= 0xff; // ttl
        auto r = parse_packet(bad);
        REQUIRE(std::holds_alternative<ParseError>(r));
        CHECK(std::get<ParseError>(r) == ParseError::BadChecksum);
    }
    SUBCASE("total_length must match the buffer") {
        auto bad = wire;
        bad.push_back(0); // extra byte not reflected in total_length
        auto r = parse_packet(bad);
        REQUIRE(std::holds_alternative<ParseError>(r));
        CHECK(std::get<ParseError>(r) == ParseError::LengthMismatch);
    }
}

TEST_CASE("packet digest ignores mutable-in-transit fields") {
    DigestKey key{0x1234, 0x5678};
    Packet a = test::marked_packet(10, 20, 1, Longevity::Days, 7);
    Packet b = a;
    b.ttl = 3;
    CHECK(packet_digest(a, key) == packet_digest(b, key));

    Packet c = a;
    c.dscp = encode_dscp({5, Longevity::Seconds});
    c.ecn = 2;
    CHECK(packet_digest(a, key) == packet_digest(c, key));
}

TEST_CASE("packet digest covers payload and length") {
    DigestKey key{0x1234, 0x5678};
    Packet a = test::marked_packet(10, 20, 1, Longevity::Days, 7);

    Packet d = a;
    d.payload[3] ^= 1;
    CHECK_FALSE(packet_digest(a, key) == packet_digest(d, key));

    // 5-byte payload vs the same 5 bytes plus 3 zero bytes: the first eight
    // digest bytes agree (zero padding), so total_length must separate them.
    Packet short_p = make_packet(10, 20, {1, 2, 3, 4, 5});
    short_p.dscp = a.dscp;
    Packet long_p = make_packet(10, 20, {1, 2, 3, 4, 5, 0, 0, 0});
    long_p.dscp = a.dscp;
    CHECK_FALSE(packet_digest(short_p, key) == packet_digest(long_p, key));
}

TEST_CASE("packet digest flips on any covered field and never on excluded ones") {
    DigestKey key{99, 100};
    Rng rng(23);
    for (int i = 0; i < 200; ++i) {
        Packet p = test::random_packet(rng);
        Digest base = packet_digest(p, key);

        Packet q = p;
        switch (rng.next_below(6)) {
        case 0: q.ip_id ^= 0x11; break;
        case 1: q.protocol ^= 0x1; break;
        case 2: q.src ^= 0x100; break;
        case 3: q.dst ^= 0x1; break;
        case 4: q.frag_offset ^= 0x3; break;
        case 5: q.dont_fragment = !q.dont_fragment; break;
        }
        CHECK_FALSE(packet_digest(q, key) == base);

        Packet r = p;
        r.ttl = static_cast<std::uint8_t>(1 + rng.next_below(255));
        r.ecn = static_cast<std::uint8_t>(rng.next_below(4));
        r.dscp = static_cast<std::uint8_t>(rng.next_below(64));
        CHECK(packet_digest(r, key) == base);
    }
}

TEST_CASE("digest depends on the key") {
    Packet p = test::marked_packet(1, 2, 0, Longevity::Seconds, 1);
    CHECK_FALSE(packet_digest(p, {1, 2}) == packet_digest(p, {3, 4}));
}
