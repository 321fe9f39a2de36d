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

#ifndef DIP_ENGINE_HH
#define DIP_ENGINE_HH

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dip/dupfilter.hpp"
#include "dip/lifetime.hpp"
#include "dip/packet.hpp"
#include "dip/routing.hpp"
#include "dip/store.hpp"

namespace dip {

struct ShaperConfig {
    std::uint64_t rate_bytes_per_s = 125000;
    std::uint64_t burst_bytes = 12500;
};

struct NodeConfig {
    std::string name;
    Ipv4Addr addr = 0;
    int interface_count = 1;
    bool parking_enabled = true;

    ShaperConfig shaper;
    SimTime pacing_interval = milliseconds(100);
    std::uint64_t backpressure_threshold_bytes = 10000;
    std::uint64_t link_queue_capacity_bytes = 65536;
    SimTime tick_granularity = seconds(10);

    StoreConfig store;
    std::size_t bloom_capacity = 10000;
    double bloom_target_fpr = 0.01;
    std::uint64_t rng_seed = 1;
};

enum class DropReason : int {
    TtlExpired = 0,
    LifetimeExpired,
    Duplicate,
    QueueFull,
    NoRouteNonDip,
    MalformedHeader,
    ShaperOverflow,
};
constexpr int kDropReasonCount = 7;
const char* drop_reason_name(DropReason r);

struct Verdict {
    enum class Kind { Delivered, Forwarded, Parked, Dropped };

    Kind kind = Kind::Dropped;
    DropReason reason = DropReason::NoRouteNonDip; // when Dropped
    int interface_id = -1;                         // when Forwarded
    Ipv4Addr next_hop = 0;                         // when Forwarded
    // Previously parked packets evicted to admit this one (head drop);
    // already counted as QueueFull drops.
    std::vector<Packet> evicted;
};

struct NodeCounters {
    std::uint64_t ingress = 0;
    std::uint64_t delivered = 0;
    std::uint64_t forwarded = 0;
    std::uint64_t parks = 0; // cumulative admissions
    std::uint64_t reinjected_packets = 0;
    std::uint64_t reinjected_bytes = 0;
    std::array<std::uint64_t, kDropReasonCount> drops{};

    std::uint64_t drops_total() const {
        std::uint64_t sum = 0;
        for (auto d : drops)
            sum += d;
        return sum;
    }
};

// Observer for per-packet dispositions, including reinjections and lifetime
// expiries. Used by the simulator for flow accounting and event logs.
using VerdictHook =
    std::function<void(const Packet&, const Verdict&, SimTime, bool reinjected)>;

// One DIP router: classify and forward-or-park on arrival, paced reinjection
// when routes come back, tick-driven expiry. Single-threaded by design; the
// simulator (or any other host) serializes all calls.
class DipNode {
  public:
    explicit DipNode(const NodeConfig& cfg);

    void set_verdict_hook(VerdictHook hook) { hook_ = std::move(hook); }

    // Ingress with wire bytes: parse errors become MalformedHeader drops.
    Verdict handle_raw(std::span<const std::uint8_t> bytes, SimTime now);
    Verdict handle_packet(Packet pkt, SimTime now);

    void on_topology_event(const TopologyEvent& ev, SimTime now);

    // Runs one lifetime tick: expired packets leave the store and are counted
    // as LifetimeExpired drops. Returns them for logging.
    std::vector<Packet> on_tick(SimTime now);

    bool drain_active() const { return !active_drains_.empty(); }
    // One round-robin reinjection step; call every pacing interval while
    // drain_active().
    void drain_pulse(SimTime now);

    // Outbound link queues, one per interface, consumed by the transmitter.
    std::optional<Packet> pop_tx(int iface);
    std::size_t tx_queue_len(int iface) const { return tx_[iface].fifo.size(); }
    std::uint64_t tx_queue_bytes(int iface) const { return tx_[iface].bytes; }

    std::uint64_t shaper_tokens(int iface, SimTime now);

    const NodeConfig& config() const { return cfg_; }
    const NodeCounters& counters() const { return counters_; }
    RoutingTables& routing() { return routing_; }
    DisruptionStore& store() { return store_; }
    LifetimeWheel& wheel() { return wheel_; }
    CountingBloomFilter& filter() { return filter_; }

    std::uint64_t parked_packets() const { return store_.packets_live(); }
    std::uint64_t parked_bytes() const { return store_.bytes_used(); }

    // ingress == delivered + forwarded + parked(live) + drops
    bool conservation_holds() const;

  private:
    struct Shaper {
        // Tokens scaled by usec/sec so refill stays integral.
        std::uint64_t scaled = 0;
        SimTime last_refill = 0;
    };
    struct TxQueue {
        std::deque<Packet> fifo;
        std::uint64_t bytes = 0;
    };

    Verdict route_and_send(Packet&& pkt, SimTime now);
    Verdict dispose(Packet pkt, SimTime now, bool reinjected);
    void count_verdict(const Verdict& v);
    void refill(Shaper& s, SimTime now);

    NodeConfig cfg_;
    RoutingTables routing_;
    LifetimeWheel wheel_;
    CountingBloomFilter filter_;
    DisruptionStore store_;
    Rng rng_;
    std::vector<Shaper> shapers_;
    std::vector<TxQueue> tx_;
    std::deque<Prefix> active_drains_;
    NodeCounters counters_;
    VerdictHook hook_;
};

} // namespace dip

#endif
