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

#include "dip/sim.hpp"

#include <cassert>
#include <cmath>
#include <memory>
#include <set>
#include <variant>

namespace dip {

int Scenario::node_index(const std::string& node_name) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].config.name == node_name)
            return static_cast<int>(i);
    return -1;
}

std::vector<std::pair<SimTime, SimTime>> expand_schedule(const LinkSpec& link,
                                                         SimTime duration) {
    if (link.periodic) {
        std::vector<std::pair<SimTime, SimTime>> out;
        const PeriodicSchedule& p = *link.periodic;
        for (SimTime base = 0; base < duration; base += p.period) {
            SimTime a = base + p.up_start;
            SimTime b = base + p.up_end;
            if (a >= duration)
                break;
            out.emplace_back(a, b);
        }
        return out;
    }
    return link.up_intervals;
}

namespace {

void check_intervals(const std::string& path,
                     const std::vector<std::pair<SimTime, SimTime>>& iv) {
    SimTime prev_end = -1;
    for (const auto& [a, b] : iv) {
        if (a < 0 || b <= a)
            throw ScenarioError(path, "interval must satisfy 0 <= start < end");
        if (a < prev_end)
            throw ScenarioError(path, "intervals must be sorted and disjoint");
        prev_end = b;
    }
}

} // namespace

void validate_scenario(const Scenario& s) {
    if (s.duration <= 0)
        throw ScenarioError("scenario: duration_s", "must be positive");

    std::set<std::string> names;
    std::set<Ipv4Addr> addrs;
    for (const NodeSpec& n : s.nodes) {
        const std::string path = "node " + n.config.name;
        if (n.config.name.empty())
            throw ScenarioError("node: name", "must not be empty");
        if (!names.insert(n.config.name).second)
            throw ScenarioError(path + ": name", "duplicate node name");
        if (n.config.addr == 0)
            throw ScenarioError(path + ": addr", "must be a nonzero address");
        if (!addrs.insert(n.config.addr).second)
            throw ScenarioError(path + ": addr", "duplicate node address");
        if (n.config.shaper.rate_bytes_per_s < 1)
            throw ScenarioError(path + ": shaper_rate_bytes_per_s", "must be >= 1");
        if (n.config.shaper.burst_bytes < 1)
            throw ScenarioError(path + ": shaper_burst_bytes", "must be >= 1");
        if (n.config.pacing_interval <= 0)
            throw ScenarioError(path + ": pacing_interval_s", "must be positive");
        if (n.config.backpressure_threshold_bytes > n.config.link_queue_capacity_bytes)
            throw ScenarioError(path + ": backpressure_threshold_bytes",
                                "must not exceed link_queue_capacity_bytes");
        if (n.config.tick_granularity <= 0)
            throw ScenarioError(path + ": tick_granularity_s", "must be positive");
        if (n.config.store.byte_capacity < 1)
            throw ScenarioError(path + ": store_capacity_bytes", "must be >= 1");
        if (n.config.store.bucket_count < 1)
            throw ScenarioError(path + ": bucket_count", "must be >= 1");
        if (n.config.store.bucket_packet_limit < 1)
            throw ScenarioError(path + ": bucket_packet_limit", "must be >= 1");
        if (n.config.store.bucket_byte_limit < 1)
            throw ScenarioError(path + ": bucket_byte_limit", "must be >= 1");
        const RedParams& red = n.config.store.red;
        if (red.min_th < 0 || red.max_th <= red.min_th)
            throw ScenarioError(path + ": red_min_th", "need 0 <= min_th < max_th");
        if (!(red.max_p > 0.0) || red.max_p > 1.0)
            throw ScenarioError(path + ": red_max_p", "must be in (0, 1]");
        if (!(red.ewma_weight > 0.0) || red.ewma_weight > 1.0)
            throw ScenarioError(path + ": red_ewma_weight", "must be in (0, 1]");
        if (n.config.bloom_capacity < 1)
            throw ScenarioError(path + ": bloom_capacity", "must be >= 1");
        if (!(n.config.bloom_target_fpr > 0.0) || !(n.config.bloom_target_fpr < 1.0))
            throw ScenarioError(path + ": bloom_target_fpr", "must be in (0, 1)");
        if (n.detection.up < 0 || n.detection.down < 0)
            throw ScenarioError(path + ": detection_up_latency_s", "must be >= 0");
    }

    std::set<std::pair<int, int>> pairs;
    for (const LinkSpec& l : s.links) {
        const std::string path = "link " + l.name;
        if (l.node_a < 0 || l.node_a >= static_cast<int>(s.nodes.size()))
            throw ScenarioError(path + ": node_a", "unknown node");
        if (l.node_b < 0 || l.node_b >= static_cast<int>(s.nodes.size()))
            throw ScenarioError(path + ": node_b", "unknown node");
        if (l.node_a == l.node_b)
            throw ScenarioError(path + ": node_b", "link endpoints must differ");
        auto pair = std::minmax(l.node_a, l.node_b);
        if (!pairs.insert({pair.first, pair.second}).second)
            throw ScenarioError(path, "duplicate link between the same nodes");
        if (l.bandwidth_bytes_per_s < 1)
            throw ScenarioError(path + ": bandwidth_bytes_per_s", "must be >= 1");
        if (l.propagation_delay < 0)
            throw ScenarioError(path + ": propagation_delay_s", "must be >= 0");
        if (l.periodic) {
            if (l.periodic->period <= 0)
                throw ScenarioError(path + ": schedule_period_s", "must be positive");
            if (l.periodic->up_start < 0 || l.periodic->up_end <= l.periodic->up_start ||
                l.periodic->up_end > l.periodic->period)
                throw ScenarioError(path + ": schedule_up_start_s",
                                    "need 0 <= up_start < up_end <= period");
        }
        check_intervals(path + ": up_interval", l.up_intervals);
        if (l.schedule_kind == LinkSpec::ScheduleKind::Intervals && !l.periodic &&
            l.up_intervals.empty())
            throw ScenarioError(path + ": up_interval", "scheduled link has no intervals");
    }

    for (const RouteSpec& r : s.routes) {
        if (r.node < 0 || r.node >= static_cast<int>(s.nodes.size()))
            throw ScenarioError("route: node", "unknown node");
        const std::string path =
            "route " + s.nodes[r.node].config.name + " " + r.prefix.str();
        int peer = -1;
        for (std::size_t i = 0; i < s.nodes.size(); ++i)
            if (s.nodes[i].config.addr == r.next_hop)
                peer = static_cast<int>(i);
        if (peer < 0)
            throw ScenarioError(path + ": next_hop", "no node has this address");
        if (peer == r.node)
            throw ScenarioError(path + ": next_hop", "route points at its own node");
        bool adjacent = false;
        for (const LinkSpec& l : s.links)
            if ((l.node_a == r.node && l.node_b == peer) ||
                (l.node_b == r.node && l.node_a == peer))
                adjacent = true;
        if (!adjacent)
            throw ScenarioError(path + ": next_hop", "next hop is not on any link");
        check_intervals(path + ": up_interval", r.up_intervals);
    }

    for (const FlowSpec& f : s.flows) {
        const std::string path = "flow " + f.name;
        if (f.src_node < 0 || f.src_node >= static_cast<int>(s.nodes.size()))
            throw ScenarioError(path + ": src", "unknown node");
        if (f.dst_node < 0 || f.dst_node >= static_cast<int>(s.nodes.size()))
            throw ScenarioError(path + ": dst", "unknown node");
        if (f.src_node == f.dst_node)
            throw ScenarioError(path + ": dst", "src and dst must differ");
        if (f.packet_size_bytes < kHeaderBytes + 8)
            throw ScenarioError(path + ": packet_size_bytes", "must be >= 28");
        if (!(f.rate_pps > 0.0))
            throw ScenarioError(path + ": rate_pps", "must be positive");
        if (f.start < 0 || f.end <= f.start)
            throw ScenarioError(path + ": start_s", "need 0 <= start < end");
        if (f.service_class > 7)
            throw ScenarioError(path + ": service_class", "must be 0..7");
        if (f.retransmit < 1)
            throw ScenarioError(path + ": retransmit", "must be >= 1");
    }
}

namespace {

// ---------------------------------------------------------------- events

struct EvLinkChange {
    int link;
    bool up;
};
struct EvTopoDeliver {
    int node;
    TopologyEvent ev;
};
struct EvFlowEmit {
    int flow;
    std::uint64_t index;
};
struct EvArrival {
    int node;
    std::vector<std::uint8_t> bytes;
};
struct EvTick {
    int node;
    std::uint64_t k;
};
struct EvDrainPulse {
    int node;
};
struct EvTxComplete {
    int link;
    int dir;
    std::uint64_t tx_id;
};

using Event = std::variant<EvLinkChange, EvTopoDeliver, EvFlowEmit, EvArrival,
                           EvTick, EvDrainPulse, EvTxComplete>;

SimTime emission_time(const FlowSpec& f, std::uint64_t i) {
    return f.start + static_cast<SimTime>(std::llround(
                         static_cast<double>(i) * 1e6 / f.rate_pps));
}

struct FlowRef {
    int flow = -1;
    std::int64_t seq = -1;
};

FlowRef flow_ref(const Packet& pkt, std::size_t flow_count) {
    FlowRef ref;
    if (pkt.payload.size() < 8)
        return ref;
    std::uint32_t f = (static_cast<std::uint32_t>(pkt.payload[0]) << 24) |
                      (pkt.payload[1] << 16) | (pkt.payload[2] << 8) | pkt.payload[3];
    std::uint32_t s = (static_cast<std::uint32_t>(pkt.payload[4]) << 24) |
                      (pkt.payload[5] << 16) | (pkt.payload[6] << 8) | pkt.payload[7];
    if (f >= flow_count)
        return ref;
    ref.flow = static_cast<int>(f);
    ref.seq = static_cast<std::int64_t>(s);
    return ref;
}

// ------------------------------------------------------------- simulator

class Simulator {
  public:
    explicit Simulator(const Scenario& sc) : sc_(sc) {}

    MetricsReport execute();

  private:
    struct LinkDir {
        bool busy = false;
        std::uint64_t tx_id = 0;
        std::vector<std::uint8_t> bytes;
    };
    struct LinkState {
        bool phys_up = false;
        LinkDir dir[2]; // 0: a->b, 1: b->a
        int iface_at[2] = {-1, -1};
        std::vector<std::pair<SimTime, SimTime>> intervals;
        std::uint64_t bytes_carried = 0;
        std::uint64_t packets_carried = 0;
        std::uint64_t lost_mid = 0;
        std::uint64_t lost_det = 0;
    };
    struct NodeState {
        std::unique_ptr<DipNode> dip;
        DetectionLatency det;
        bool pulse_scheduled = false;
        std::vector<std::pair<int, int>> ifaces; // iface -> (link, dir)
    };
    struct FlowState {
        std::vector<SimTime> emit_time;
        std::vector<bool> delivered;
        std::vector<SimTime> latencies;
        std::uint64_t emitted_copies = 0;
        std::uint64_t delivered_copies = 0;
        std::uint64_t delivered_unique = 0;
    };

    void setup();
    void dispatch(Event& ev);
    void handle(EvLinkChange& ev);
    void handle(EvTopoDeliver& ev);
    void handle(EvFlowEmit& ev);
    void handle(EvArrival& ev);
    void handle(EvTick& ev);
    void handle(EvDrainPulse& ev);
    void handle(EvTxComplete& ev);

    void pump_node(int node);
    void pump_link(int link, int dir);
    void maybe_schedule_pulse(int node);
    void record_verdict(int node, const Packet& pkt, const Verdict& v, SimTime t,
                        bool reinjected);
    MetricsReport finish();

    int sender_of(int link, int dir) const {
        return dir == 0 ? sc_.links[link].node_a : sc_.links[link].node_b;
    }
    int receiver_of(int link, int dir) const {
        return dir == 0 ? sc_.links[link].node_b : sc_.links[link].node_a;
    }

    const Scenario& sc_;
    SimTime now_ = 0;
    EventQueue<Event> queue_;
    std::vector<NodeState> nodes_;
    std::vector<LinkState> links_;
    std::vector<FlowState> flows_;
    std::vector<OccupancySample> occupancy_;
    std::vector<VerdictEvent> events_;
    std::uint64_t next_tx_ = 0;
};

void Simulator::setup() {
    nodes_.resize(sc_.nodes.size());
    links_.resize(sc_.links.size());
    flows_.resize(sc_.flows.size());

    // Interface ids per node follow link declaration order.
    for (std::size_t li = 0; li < sc_.links.size(); ++li) {
        const LinkSpec& l = sc_.links[li];
        links_[li].iface_at[0] = static_cast<int>(nodes_[l.node_a].ifaces.size());
        nodes_[l.node_a].ifaces.emplace_back(static_cast<int>(li), 0);
        links_[li].iface_at[1] = static_cast<int>(nodes_[l.node_b].ifaces.size());
        nodes_[l.node_b].ifaces.emplace_back(static_cast<int>(li), 1);
        links_[li].intervals = expand_schedule(l, sc_.duration);
    }

    for (std::size_t ni = 0; ni < sc_.nodes.size(); ++ni) {
        NodeConfig cfg = sc_.nodes[ni].config;
        cfg.interface_count =
            std::max<int>(1, static_cast<int>(nodes_[ni].ifaces.size()));
        if (sc_.plain_ip)
            cfg.parking_enabled = false;
        cfg.rng_seed = mix64(sc_.seed ^ mix64(0x4e0de + ni));
        cfg.store.dst_hash_salt = mix64(sc_.seed ^ mix64(0x5a17 + ni));
        cfg.store.digest_key.k0 = mix64(sc_.seed ^ mix64(0xd19e51 + ni));
        cfg.store.digest_key.k1 = mix64(sc_.seed ^ mix64(0xd19e52 + ni));
        nodes_[ni].det = sc_.nodes[ni].detection;
        nodes_[ni].dip = std::make_unique<DipNode>(cfg);
        nodes_[ni].dip->set_verdict_hook(
            [this, ni](const Packet& pkt, const Verdict& v, SimTime t, bool reinj) {
                record_verdict(static_cast<int>(ni), pkt, v, t, reinj);
            });
    }

    // Seed order fixes tie-breaking at equal times: routes, link changes,
    // flow emissions, node ticks.
    for (const RouteSpec& r : sc_.routes) {
        int iface = -1;
        int peer = -1;
        for (std::size_t i = 0; i < sc_.nodes.size(); ++i)
            if (sc_.nodes[i].config.addr == r.next_hop)
                peer = static_cast<int>(i);
        for (std::size_t i = 0; i < nodes_[r.node].ifaces.size(); ++i) {
            auto [li, dir] = nodes_[r.node].ifaces[i];
            if (receiver_of(li, dir) == peer)
                iface = static_cast<int>(i);
        }
        assert(iface >= 0);
        if (r.up_intervals.empty()) {
            queue_.push(0, EvTopoDeliver{r.node, TopologyEvent::route_up(
                                                     0, r.prefix, r.next_hop, iface,
                                                     r.source)});
        } else {
            for (const auto& [a, b] : r.up_intervals) {
                if (a > sc_.duration)
                    break;
                queue_.push(a, EvTopoDeliver{r.node,
                                             TopologyEvent::route_up(
                                                 a, r.prefix, r.next_hop, iface,
                                                 RouteSource::Scheduled)});
                if (b <= sc_.duration)
                    queue_.push(b, EvTopoDeliver{r.node, TopologyEvent::route_down(
                                                             b, r.prefix)});
            }
        }
    }

    for (std::size_t li = 0; li < sc_.links.size(); ++li) {
        const LinkSpec& l = sc_.links[li];
        if (l.schedule_kind == LinkSpec::ScheduleKind::AlwaysUp) {
            queue_.push(0, EvLinkChange{static_cast<int>(li), true});
        } else if (l.schedule_kind == LinkSpec::ScheduleKind::Intervals) {
            for (const auto& [a, b] : links_[li].intervals) {
                if (a > sc_.duration)
                    break;
                queue_.push(a, EvLinkChange{static_cast<int>(li), true});
                if (b <= sc_.duration)
                    queue_.push(b, EvLinkChange{static_cast<int>(li), false});
            }
        } // AlwaysDown: stays down
    }

    for (std::size_t fi = 0; fi < sc_.flows.size(); ++fi) {
        SimTime t0 = emission_time(sc_.flows[fi], 0);
        if (t0 < sc_.flows[fi].end && t0 <= sc_.duration)
            queue_.push(t0, EvFlowEmit{static_cast<int>(fi), 0});
    }

    for (std::size_t ni = 0; ni < sc_.nodes.size(); ++ni) {
        SimTime g = sc_.nodes[ni].config.tick_granularity;
        if (g <= sc_.duration)
            queue_.push(g, EvTick{static_cast<int>(ni), 1});
    }
}

void Simulator::record_verdict(int node, const Packet& pkt, const Verdict& v,
                               SimTime t, bool reinjected) {
    FlowRef ref = flow_ref(pkt, sc_.flows.size());
    if (v.kind == Verdict::Kind::Delivered && ref.flow >= 0) {
        FlowState& fs = flows_[ref.flow];
        if (ref.seq >= 0 && static_cast<std::size_t>(ref.seq) < fs.emit_time.size()) {
            ++fs.delivered_copies;
            if (!fs.delivered[ref.seq]) {
                fs.delivered[ref.seq] = true;
                ++fs.delivered_unique;
                fs.latencies.push_back(t - fs.emit_time[ref.seq]);
            }
        }
    }
    if (!sc_.collect_events)
        return;
    auto push_event = [&](const Packet& p, const char* verdict, const char* reason,
                          bool reinj) {
        FlowRef r = flow_ref(p, sc_.flows.size());
        VerdictEvent ev;
        ev.t = t;
        ev.node = sc_.nodes[node].config.name;
        ev.verdict = verdict;
        ev.reason = reason;
        ev.flow = r.flow;
        ev.seq = r.seq;
        ev.reinjected = reinj;
        events_.push_back(std::move(ev));
    };
    switch (v.kind) {
    case Verdict::Kind::Delivered: push_event(pkt, "deliver", "", reinjected); break;
    case Verdict::Kind::Forwarded: push_event(pkt, "forward", "", reinjected); break;
    case Verdict::Kind::Parked: push_event(pkt, "park", "", reinjected); break;
    case Verdict::Kind::Dropped:
        push_event(pkt, "drop", drop_reason_name(v.reason), reinjected);
        break;
    }
    for (const Packet& evicted : v.evicted)
        push_event(evicted, "drop", drop_reason_name(DropReason::QueueFull), false);
}

void Simulator::maybe_schedule_pulse(int node) {
    NodeState& ns = nodes_[node];
    if (ns.dip->drain_active() && !ns.pulse_scheduled) {
        ns.pulse_scheduled = true;
        queue_.push(now_, EvDrainPulse{node});
    }
}

void Simulator::pump_node(int node) {
    for (auto [link, dir] : nodes_[node].ifaces)
        pump_link(link, dir);
}

void Simulator::pump_link(int link, int dir) {
    LinkState& L = links_[link];
    LinkDir& d = L.dir[dir];
    const LinkSpec& spec = sc_.links[link];
    while (!d.busy) {
        int sender = sender_of(link, dir);
        int iface = L.iface_at[dir];
        DipNode& n = *nodes_[sender].dip;
        if (n.tx_queue_len(iface) == 0)
            break;
        if (!L.phys_up) {
            Ipv4Addr peer_addr = sc_.nodes[receiver_of(link, dir)].config.addr;
            if (n.routing().neighbor_reachable(peer_addr)) {
                // The sender has not noticed the outage yet; the frame goes
                // onto a dead link and is gone.
                n.pop_tx(iface);
                ++L.lost_det;
                continue;
            }
            break; // held until the link returns
        }
        auto pkt = n.pop_tx(iface);
        d.bytes = serialize(*pkt);
        d.busy = true;
        d.tx_id = ++next_tx_;
        SimTime tx_time = static_cast<SimTime>(
            (static_cast<std::uint64_t>(d.bytes.size()) * kUsecPerSec +
             spec.bandwidth_bytes_per_s - 1) /
            spec.bandwidth_bytes_per_s);
        queue_.push(now_ + tx_time, EvTxComplete{link, dir, d.tx_id});
        break;
    }
}

void Simulator::handle(EvLinkChange& ev) {
    LinkState& L = links_[ev.link];
    L.phys_up = ev.up;
    if (!ev.up) {
        for (LinkDir& d : L.dir) {
            if (d.busy) {
                ++L.lost_mid;
                d.busy = false;
                d.bytes.clear();
            }
        }
    }
    for (int dir = 0; dir < 2; ++dir) {
        int observer = sender_of(ev.link, dir);
        Ipv4Addr peer_addr = sc_.nodes[receiver_of(ev.link, dir)].config.addr;
        int iface = L.iface_at[dir];
        SimTime lat = ev.up ? nodes_[observer].det.up : nodes_[observer].det.down;
        TopologyEvent topo = ev.up
                                 ? TopologyEvent::neighbor_up(now_ + lat, peer_addr, iface)
                                 : TopologyEvent::neighbor_down(now_ + lat, peer_addr, iface);
        if (lat == 0) {
            // Zero detection latency means the node's view tracks the link
            // atomically, ahead of any same-instant traffic.
            nodes_[observer].dip->on_topology_event(topo, now_);
            maybe_schedule_pulse(observer);
        } else {
            queue_.push(now_ + lat, EvTopoDeliver{observer, topo});
        }
    }
    if (ev.up) {
        pump_link(ev.link, 0);
        pump_link(ev.link, 1);
    }
}

void Simulator::handle(EvTopoDeliver& ev) {
    nodes_[ev.node].dip->on_topology_event(ev.ev, now_);
    maybe_schedule_pulse(ev.node);
}

void Simulator::handle(EvFlowEmit& ev) {
    const FlowSpec& f = sc_.flows[ev.flow];
    FlowState& fs = flows_[ev.flow];
    assert(fs.emit_time.size() == ev.index);
    fs.emit_time.push_back(now_);
    fs.delivered.push_back(false);

    std::vector<std::uint8_t> payload(f.packet_size_bytes - kHeaderBytes, 0);
    payload[0] = static_cast<std::uint8_t>(ev.flow >> 24);
    payload[1] = static_cast<std::uint8_t>(ev.flow >> 16);
    payload[2] = static_cast<std::uint8_t>(ev.flow >> 8);
    payload[3] = static_cast<std::uint8_t>(ev.flow);
    payload[4] = static_cast<std::uint8_t>(ev.index >> 24);
    payload[5] = static_cast<std::uint8_t>(ev.index >> 16);
    payload[6] = static_cast<std::uint8_t>(ev.index >> 8);
    payload[7] = static_cast<std::uint8_t>(ev.index);

    Packet pkt = make_packet(sc_.nodes[f.src_node].config.addr,
                             sc_.nodes[f.dst_node].config.addr, std::move(payload));
    pkt.dscp = encode_dscp(DipMarking{f.service_class, f.longevity});
    pkt.protocol = f.protocol;
    pkt.ip_id = static_cast<std::uint16_t>(ev.index & 0xffff);

    for (int copy = 0; copy < f.retransmit; ++copy) {
        ++fs.emitted_copies;
        nodes_[f.src_node].dip->handle_packet(pkt, now_);
    }
    pump_node(f.src_node);

    SimTime tn = emission_time(f, ev.index + 1);
    if (tn < f.end && tn <= sc_.duration)
        queue_.push(tn, EvFlowEmit{ev.flow, ev.index + 1});
}

void Simulator::handle(EvArrival& ev) {
    nodes_[ev.node].dip->handle_raw(ev.bytes, now_);
    pump_node(ev.node);
}

void Simulator::handle(EvTick& ev) {
    DipNode& n = *nodes_[ev.node].dip;
    n.on_tick(now_);
    occupancy_.push_back(OccupancySample{now_, sc_.nodes[ev.node].config.name,
                                         n.parked_bytes(), n.parked_packets()});
    SimTime tn = static_cast<SimTime>(ev.k + 1) * sc_.nodes[ev.node].config.tick_granularity;
    if (tn <= sc_.duration)
        queue_.push(tn, EvTick{ev.node, ev.k + 1});
}

void Simulator::handle(EvDrainPulse& ev) {
    NodeState& ns = nodes_[ev.node];
    ns.pulse_scheduled = false;
    ns.dip->drain_pulse(now_);
    pump_node(ev.node);
    if (ns.dip->drain_active()) {
        ns.pulse_scheduled = true;
        queue_.push(now_ + ns.dip->config().pacing_interval, EvDrainPulse{ev.node});
    }
}

void Simulator::handle(EvTxComplete& ev) {
    LinkState& L = links_[ev.link];
    LinkDir& d = L.dir[ev.dir];
    if (!d.busy || d.tx_id != ev.tx_id)
        return; // transmission was lost to a link drop
    d.busy = false;
    L.bytes_carried += d.bytes.size();
    ++L.packets_carried;
    int peer = receiver_of(ev.link, ev.dir);
    queue_.push(now_ + sc_.links[ev.link].propagation_delay,
                EvArrival{peer, std::move(d.bytes)});
    d.bytes.clear();
    pump_link(ev.link, ev.dir);
}

void Simulator::dispatch(Event& ev) {
    std::visit([this](auto& e) { handle(e); }, ev);
}

MetricsReport Simulator::finish() {
    MetricsReport r;
    r.scenario_name = sc_.name;
    r.seed = sc_.seed;
    r.mode = sc_.plain_ip ? "plain-ip" : "dip";
    r.duration = sc_.duration;

    for (std::size_t ni = 0; ni < nodes_.size(); ++ni) {
        NodeMetrics nm;
        nm.name = sc_.nodes[ni].config.name;
        nm.counters = nodes_[ni].dip->counters();
        nm.parked_end_packets = nodes_[ni].dip->parked_packets();
        nm.parked_end_bytes = nodes_[ni].dip->parked_bytes();
        r.parked_end_total += nm.parked_end_packets;
        r.dropped_total += nm.counters.drops_total();
        r.nodes.push_back(std::move(nm));
    }

    for (std::size_t fi = 0; fi < flows_.size(); ++fi) {
        const FlowSpec& spec = sc_.flows[fi];
        FlowState& fs = flows_[fi];
        FlowMetrics fm;
        fm.name = spec.name;
        fm.src = sc_.nodes[spec.src_node].config.name;
        fm.dst = sc_.nodes[spec.dst_node].config.name;
        fm.emitted_unique = fs.emit_time.size();
        fm.emitted_copies = fs.emitted_copies;
        fm.delivered_unique = fs.delivered_unique;
        fm.delivered_copies = fs.delivered_copies;
        fm.delivery_ratio = fm.emitted_unique == 0
                                ? 0.0
                                : static_cast<double>(fm.delivered_unique) /
                                      static_cast<double>(fm.emitted_unique);
        if (!fs.latencies.empty()) {
            std::vector<SimTime> sorted = fs.latencies;
            std::sort(sorted.begin(), sorted.end());
            fm.latency_min_us = sorted.front();
            fm.latency_max_us = sorted.back();
            std::size_t n = sorted.size();
            fm.latency_p95_us = sorted[(n * 95 + 99) / 100 - 1];
            long double sum = 0;
            for (SimTime l : sorted)
                sum += static_cast<long double>(l);
            fm.latency_mean_us = static_cast<double>(sum / static_cast<long double>(n));
        }
        r.emitted_copies_total += fm.emitted_copies;
        r.delivered_copies_total += fm.delivered_copies;
        r.flows.push_back(std::move(fm));
    }

    std::uint64_t inflight = 0;
    for (std::size_t li = 0; li < links_.size(); ++li) {
        LinkMetrics lm;
        lm.name = sc_.links[li].name;
        lm.bytes_carried = links_[li].bytes_carried;
        lm.packets_carried = links_[li].packets_carried;
        lm.lost_mid_transmission = links_[li].lost_mid;
        lm.lost_detection_window = links_[li].lost_det;
        r.dropped_total += lm.lost_mid_transmission + lm.lost_detection_window;
        for (const LinkDir& d : links_[li].dir)
            if (d.busy)
                ++inflight;
        r.links.push_back(std::move(lm));
    }
    for (std::size_t ni = 0; ni < nodes_.size(); ++ni)
        for (std::size_t i = 0; i < nodes_[ni].ifaces.size(); ++i)
            inflight += nodes_[ni].dip->tx_queue_len(static_cast<int>(i));
    for (const auto& item : queue_.pending())
        if (std::holds_alternative<EvArrival>(item.event))
            ++inflight;
    r.inflight_end_total = inflight;

    r.occupancy = std::move(occupancy_);
    r.events = std::move(events_);
    return r;
}

MetricsReport Simulator::execute() {
    setup();
    while (!queue_.empty() && queue_.next_time() <= sc_.duration) {
        auto item = queue_.pop();
        now_ = item.t;
        dispatch(item.event);
    }
    return finish();
}

} // namespace

bool conservation_holds(const MetricsReport& r) {
    return r.emitted_copies_total == r.delivered_copies_total + r.parked_end_total +
                                         r.inflight_end_total + r.dropped_total;
}

MetricsReport run(const Scenario& scenario) {
    validate_scenario(scenario);
    Simulator sim(scenario);
    return sim.execute();
}

Scenario build_data_mule(const MuleParams& p) {
    if (p.contact <= 0 || p.gap < 0)
        throw ScenarioError("demo-mule: contact_s", "must be positive");
    if (p.duration <= 0)
        throw ScenarioError("demo-mule: duration_s", "must be positive");

    const SimTime period = 2 * (p.contact + p.gap);

    Scenario s;
    s.name = "data-mule";
    s.duration = p.duration;
    s.seed = p.seed;

    auto make_node = [&](const std::string& name, Ipv4Addr addr) {
        NodeSpec n;
        n.config.name = name;
        n.config.addr = addr;
        return n;
    };
    Ipv4Addr house_a = *parse_ipv4("10.0.0.1");
    Ipv4Addr mule = *parse_ipv4("10.0.0.2");
    Ipv4Addr house_b = *parse_ipv4("10.0.0.3");
    s.nodes.push_back(make_node("houseA", house_a));
    s.nodes.push_back(make_node("mule", mule));
    s.nodes.push_back(make_node("houseB", house_b));

    LinkSpec la;
    la.name = "a_mule";
    la.node_a = 0;
    la.node_b = 1;
    la.bandwidth_bytes_per_s = p.bandwidth_bytes_per_s;
    la.propagation_delay = p.propagation_delay;
    la.schedule_kind = LinkSpec::ScheduleKind::Intervals;
    la.periodic = PeriodicSchedule{period, 0, p.contact};
    s.links.push_back(la);

    LinkSpec lb = la;
    lb.name = "mule_b";
    lb.node_a = 1;
    lb.node_b = 2;
    lb.periodic = PeriodicSchedule{period, period / 2, period / 2 + p.contact};
    s.links.push_back(lb);

    auto add_route = [&](int node, const char* prefix, Ipv4Addr nh) {
        RouteSpec r;
        r.node = node;
        r.prefix = *parse_prefix(prefix);
        r.next_hop = nh;
        s.routes.push_back(r);
    };
    add_route(0, "0.0.0.0/0", mule);
    add_route(2, "0.0.0.0/0", mule);
    add_route(1, "10.0.0.1/32", house_a);
    add_route(1, "10.0.0.3/32", house_b);

    FlowSpec f;
    f.name = "a_to_b";
    f.src_node = 0;
    f.dst_node = 2;
    f.packet_size_bytes = p.packet_size_bytes;
    f.rate_pps = p.flow_rate_pps;
    f.start = 0;
    f.end = p.flow_end.value_or(std::max<SimTime>(p.duration - period, 1));
    f.service_class = p.service_class;
    f.longevity = p.longevity;
    s.flows.push_back(f);

    return s;
}

} // namespace dip
