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

#include "dip/engine.hpp"
#include "test_util.hpp"

using namespace dip;

namespace {

Prefix pfx(const char* text) {
    return *parse_prefix(text);
}

Ipv4Addr ip(const char* text) {
    return *parse_ipv4(text);
}

NodeConfig base_config() {
    NodeConfig cfg;
    cfg.name = "n0";
    cfg.addr = ip("10.0.0.1");
    cfg.interface_count = 2;
    cfg.shaper = {125000, 12500};
    cfg.pacing_interval = milliseconds(100);
    cfg.backpressure_threshold_bytes = 10000;
    cfg.link_queue_capacity_bytes = 65536;
    return cfg;
}

// Installs a usable default route via 10.0.0.2 on interface 0.
void bring_up_default(DipNode& node, SimTime t = 0) {
    node.on_topology_event(
        TopologyEvent::route_up(t, pfx("0.0.0.0/0"), ip("10.0.0.2"), 0), t);
    node.on_topology_event(TopologyEvent::neighbor_up(t, ip("10.0.0.2"), 0), t);
}

} // namespace

TEST_CASE("usable route: forward with the ttl decremented on the wire") {
    DipNode node(base_config());
    bring_up_default(node);
    Packet p = test::marked_packet(ip("10.0.0.9"), ip("10.9.9.9"), 0, Longevity::Days, 1);
    p.ttl = 64;
    auto v = node.handle_packet(p, 0);
    CHECK(v.kind == Verdict::Kind::Forwarded);
    CHECK(v.interface_id == 0);
    auto sent = node.pop_tx(0);
    REQUIRE(sent.has_value());
    CHECK(sent->ttl == 63);
}

TEST_CASE("ttl that would reach zero drops the packet") {
    DipNode node(base_config());
    bring_up_default(node);
    Packet p = test::marked_packet(ip("10.0.0.9"), ip("10.9.9.9"), 0, Longevity::Days, 1);
    p.ttl = 1;
    auto v = node.handle_packet(p, 0);
    CHECK(v.kind == Verdict::Kind::Dropped);
    CHECK(v.reason == DropReason::TtlExpired);
}

TEST_CASE("local destination delivers") {
    DipNode node(base_config());
    Packet p = test::marked_packet(ip("10.0.0.9"), ip("10.0.0.1"), 0, Longevity::Days, 1);
    CHECK(node.handle_packet(p, 0).kind == Verdict::Kind::Delivered);
}

TEST_CASE("DIP packet parks when routes are down; its retransmission is a duplicate") {
    DipNode node(base_config());
    node.on_topology_event(
        TopologyEvent::route_up(0, pfx("0.0.0.0/0"), ip("10.0.0.2"), 0), 0);
    // neighbor never came up
    Packet p = test::marked_packet(ip("10.0.0.9"), ip("10.9.9.9"), 0, Longevity::Days, 1);
    CHECK(node.handle_packet(p, 0).kind == Verdict::Kind::Parked);
    auto v = node.handle_packet(p, seconds(1));
    CHECK(v.kind == Verdict::Kind::Dropped);
    CHECK(v.reason == DropReason::Duplicate);
    CHECK(node.counters().drops[static_cast<int>(DropReason::Duplicate)] == 1);
}

TEST_CASE("a plain packet with no usable route drops like ordinary IP") {
    DipNode node(base_config());
    Packet p = test::marked_packet(ip("10.0.0.9"), ip("10.9.9.9"), 0, Longevity::Days, 1);
    p.dscp = 0; // not a DIP codepoint
    auto v = node.handle_packet(p, 0);
    CHECK(v.kind == Verdict::Kind::Dropped);
    CHECK(v.reason == DropReason::NoRouteNonDip);
}

TEST_CASE("parking disabled makes even DIP packets drop without a route") {
    NodeConfig cfg = base_config();
    cfg.parking_enabled = false;
    DipNode node(cfg);
    Packet p = test::marked_packet(ip("10.0.0.9"), ip("10.9.9.9"), 0, Longevity::Days, 1);
    auto v = node.handle_packet(p, 0);
    CHECK(v.kind == Verdict::Kind::Dropped);
    CHECK(v.reason == DropReason::NoRouteNonDip);
}

TEST_CASE("garbage at ingress is a malformed-header drop") {
    DipNode node(base_config());
    std::vector<std::uint8_t> junk(10, 0xab);
    auto v = node.handle_raw(junk, 0);
    CHECK(v.kind == Verdict::Kind::Dropped);
    CHECK(v.reason == DropReason::MalformedHeader);
}

TEST_CASE("paced reinjection obeys the token bucket") {
    NodeConfig cfg = base_config();
    cfg.shaper = {1000, 1000}; // 1000 B/s, 1000 B burst
    cfg.backpressure_threshold_bytes = 100000;
    cfg.link_queue_capacity_bytes = 200000;
    DipNode node(cfg);
    node.on_topology_event(
        TopologyEvent::route_up(0, pfx("0.0.0.0/0"), ip("10.0.0.2"), 0), 0);

    for (std::uint32_t i = 0; i < 100; ++i) {
        Packet p = test::marked_packet(ip("10.0.0.9"), ip("10.9.9.9"), 0,
                                       Longevity::Days, i, 100);
        REQUIRE(node.handle_packet(p, 0).kind == Verdict::Kind::Parked);
    }
    CHECK(node.parked_packets() == 100);

    node.on_topology_event(TopologyEvent::neighbor_up(0, ip("10.0.0.2"), 0), 0);
    REQUIRE(node.drain_active());

    // First pulse spends the whole burst: ten 100-byte packets.
    node.drain_pulse(0);
    CHECK(node.tx_queue_len(0) == 10);
    while (node.pop_tx(0))
        ;

    // Each subsequent 100 ms pulse accrues exactly 100 bytes: one packet.
    for (int pulse = 1; pulse <= 5; ++pulse) {
        node.drain_pulse(static_cast<SimTime>(pulse) * milliseconds(100));
        CHECK(node.tx_queue_len(0) == 1);
        while (node.pop_tx(0))
            ;
    }
    CHECK(node.parked_packets() == 85);
    CHECK(node.counters().reinjected_packets == 15);
}

TEST_CASE("drains of simultaneously usable prefixes alternate round-robin") {
    NodeConfig cfg = base_config();
    cfg.shaper = {1000, 100}; // budget for exactly one 100-byte packet per pulse
    DipNode node(cfg);
    node.on_topology_event(
        TopologyEvent::route_up(0, pfx("10.1.0.0/16"), ip("10.0.0.2"), 0), 0);
    node.on_topology_event(
        TopologyEvent::route_up(0, pfx("10.2.0.0/16"), ip("10.0.0.2"), 0), 0);

    for (std::uint32_t i = 0; i < 2; ++i) {
        Packet a = test::marked_packet(ip("10.0.0.9"), ip("10.1.0.1"), 0,
                                       Longevity::Days, i);
        Packet b = test::marked_packet(ip("10.0.0.9"), ip("10.2.0.1"), 0,
                                       Longevity::Days, 100 + i);
        REQUIRE(node.handle_packet(a, 0).kind == Verdict::Kind::Parked);
        REQUIRE(node.handle_packet(b, 0).kind == Verdict::Kind::Parked);
    }
    node.on_topology_event(TopologyEvent::neighbor_up(0, ip("10.0.0.2"), 0), 0);

    // One packet of budget per pulse, so pulses alternate prefixes.
    std::vector<Ipv4Addr> order;
    for (int pulse = 0; pulse < 4; ++pulse) {
        node.drain_pulse(static_cast<SimTime>(pulse) * milliseconds(100));
        while (auto p = node.pop_tx(0))
            order.push_back(p->dst);
    }
    REQUIRE(order.size() == 4);
    CHECK(order[0] != order[1]);
    CHECK(order[0] == order[2]);
    CHECK(order[1] == order[3]);
}

TEST_CASE("a route flap before the pulse leaves packets parked") {
    DipNode node(base_config());
    node.on_topology_event(
        TopologyEvent::route_up(0, pfx("0.0.0.0/0"), ip("10.0.0.2"), 0), 0);
    Packet p = test::marked_packet(ip("10.0.0.9"), ip("10.9.9.9"), 0, Longevity::Days, 1);
    node.handle_packet(p, 0);

    node.on_topology_event(TopologyEvent::neighbor_up(0, ip("10.0.0.2"), 0), 0);
    node.on_topology_event(TopologyEvent::neighbor_down(0, ip("10.0.0.2"), 0), 0);
    node.drain_pulse(milliseconds(100));
    CHECK(node.parked_packets() == 1);
    CHECK(node.tx_queue_len(0) == 0);
    CHECK_FALSE(node.drain_active());
}

TEST_CASE("lifetime expiry on tick counts as a lifetime-expired drop") {
    DipNode node(base_config());
    node.on_topology_event(
        TopologyEvent::route_up(0, pfx("0.0.0.0/0"), ip("10.0.0.2"), 0), 0);
    Packet p =
        test::marked_packet(ip("10.0.0.9"), ip("10.9.9.9"), 0, Longevity::Seconds, 1);
    REQUIRE(node.handle_packet(p, 0).kind == Verdict::Kind::Parked);

    SimTime g = node.config().tick_granularity;
    std::vector<Packet> expired;
    for (int k = 1; k <= 7; ++k) {
        auto out = node.on_tick(static_cast<SimTime>(k) * g);
        for (auto& e : out)
            expired.push_back(std::move(e));
    }
    REQUIRE(expired.size() == 1);
    CHECK(node.parked_packets() == 0);
    CHECK(node.counters().drops[static_cast<int>(DropReason::LifetimeExpired)] == 1);
}

TEST_CASE("shaper tokens cap at the burst size") {
    NodeConfig cfg = base_config();
    cfg.shaper = {1000, 5000};
    DipNode node(cfg);
    CHECK(node.shaper_tokens(0, 0) == 5000);
    CHECK(node.shaper_tokens(0, seconds(3600)) == 5000); // refill is a no-op at cap
}

TEST_CASE("reinjected packets carry remarked longevity bits") {
    NodeConfig cfg = base_config();
    DipNode node(cfg);
    node.on_topology_event(
        TopologyEvent::route_up(0, pfx("0.0.0.0/0"), ip("10.0.0.2"), 0), 0);
    Packet p = test::marked_packet(ip("10.0.0.9"), ip("10.9.9.9"), 2, Longevity::Hours, 1);
    REQUIRE(node.handle_packet(p, 0).kind == Verdict::Kind::Parked);

    // 23.5 h later the remaining lifetime fits the minutes category.
    SimTime later = seconds(86400 - 1800);
    node.on_topology_event(TopologyEvent::neighbor_up(later, ip("10.0.0.2"), 0), later);
    node.drain_pulse(later);
    auto sent = node.pop_tx(0);
    REQUIRE(sent.has_value());
    auto marking = decode_dscp(sent->dscp);
    REQUIRE(marking.has_value());
    CHECK(marking->service_class == 2);
    CHECK(marking->longevity == Longevity::Minutes);
}

TEST_CASE("per-node conservation holds through mixed traffic") {
    Rng rng(31);
    DipNode node(base_config());
    node.on_topology_event(
        TopologyEvent::route_up(0, pfx("10.0.0.0/8"), ip("10.0.0.2"), 0), 0);
    node.on_topology_event(TopologyEvent::neighbor_up(0, ip("10.0.0.2"), 0), 0);

    SimTime now = 0;
    std::uint64_t ticks = 0;
    for (int step = 0; step < 1000; ++step) {
        std::uint32_t dst = rng.next_below(2) == 0
                                ? ip("10.1.1.1")   // routable
                                : ip("172.16.0.1"); // no route: parks or drops
        auto cat = static_cast<Longevity>(rng.next_below(4));
        Packet p = test::marked_packet(ip("10.0.0.9"), dst,
                                       static_cast<std::uint8_t>(rng.next_below(8)),
                                       cat, static_cast<std::uint32_t>(step));
        if (rng.next_below(8) == 0)
            p.dscp = 0; // plain IP
        if (rng.next_below(10) == 0)
            p.ttl = 1;
        node.handle_packet(p, now);
        while (node.pop_tx(0))
            ;
        if (rng.next_below(4) == 0) {
            ++ticks;
            now = static_cast<SimTime>(ticks) * node.config().tick_granularity;
            node.on_tick(now);
        }
        CHECK(node.conservation_holds());
    }
}
