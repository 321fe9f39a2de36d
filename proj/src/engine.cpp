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

#include "dip/engine.hpp"

#include <algorithm>
#include <cassert>
#include <limits>

namespace dip {

const char* drop_reason_name(DropReason r) {
    switch (r) {
    case DropReason::TtlExpired: return "ttl_expired";
    case DropReason::LifetimeExpired: return "lifetime_expired";
    case DropReason::Duplicate: return "duplicate";
    case DropReason::QueueFull: return "queue_full";
    case DropReason::NoRouteNonDip: return "no_route_non_dip";
    case DropReason::MalformedHeader: return "malformed_header";
    case DropReason::ShaperOverflow: return "shaper_overflow";
    }
    return "?";
}

DipNode::DipNode(const NodeConfig& cfg)
    : cfg_(cfg),
      wheel_(cfg.tick_granularity),
      filter_(CountingBloomFilter::with_capacity(cfg.bloom_capacity, cfg.bloom_target_fpr)),
      store_(cfg.store, filter_, wheel_),
      rng_(cfg.rng_seed),
      shapers_(static_cast<std::size_t>(cfg.interface_count)),
      tx_(static_cast<std::size_t>(cfg.interface_count)) {
    for (auto& s : shapers_)
        s.scaled = cfg_.shaper.burst_bytes * static_cast<std::uint64_t>(kUsecPerSec);
}

void DipNode::refill(Shaper& s, SimTime now) {
    if (now <= s.last_refill)
        return;
    const std::uint64_t burst_scaled =
        cfg_.shaper.burst_bytes * static_cast<std::uint64_t>(kUsecPerSec);
    std::uint64_t elapsed = static_cast<std::uint64_t>(now - s.last_refill);
    std::uint64_t deficit = burst_scaled - s.scaled;
    if (cfg_.shaper.rate_bytes_per_s > 0 &&
        elapsed >= deficit / cfg_.shaper.rate_bytes_per_s + 1) {
        s.scaled = burst_scaled;
    } else {
        s.scaled += cfg_.shaper.rate_bytes_per_s * elapsed;
        if (s.scaled > burst_scaled)
            s.scaled = burst_scaled;
    }
    s.last_refill = now;
}

std::uint64_t DipNode::shaper_tokens(int iface, SimTime now) {
    Shaper& s = shapers_[static_cast<std::size_t>(iface)];
    refill(s, now);
    return s.scaled / static_cast<std::uint64_t>(kUsecPerSec);
}

Verdict DipNode::handle_raw(std::span<const std::uint8_t> bytes, SimTime now) {
    auto parsed = parse_packet(bytes);
    if (std::holds_alternative<ParseError>(parsed)) {
        ++counters_.ingress;
        Verdict v;
        v.kind = Verdict::Kind::Dropped;
        v.reason = DropReason::MalformedHeader;
        count_verdict(v);
        if (hook_)
            hook_(Packet{}, v, now, false);
        return v;
    }
    return handle_packet(std::get<Packet>(std::move(parsed)), now);
}

Verdict DipNode::handle_packet(Packet pkt, SimTime now) {
    ++counters_.ingress;
    return dispose(std::move(pkt), now, false);
}

Verdict DipNode::dispose(Packet pkt, SimTime now, bool reinjected) {
    if (hook_) {
        Packet copy = pkt;
        Verdict v = route_and_send(std::move(pkt), now);
        count_verdict(v);
        hook_(copy, v, now, reinjected);
        return v;
    }
    Verdict v = route_and_send(std::move(pkt), now);
    count_verdict(v);
    return v;
}

Verdict DipNode::route_and_send(Packet&& pkt, SimTime now) {
    Verdict v;
    if (pkt.dst == cfg_.addr) {
        v.kind = Verdict::Kind::Delivered;
        return v;
    }

    LookupResult r = routing_.lookup(pkt.dst);
    if (r.kind == LookupResult::Kind::Usable) {
        if (pkt.ttl <= 1) {
            v.kind = Verdict::Kind::Dropped;
            v.reason = DropReason::TtlExpired;
            return v;
        }
        --pkt.ttl;
        TxQueue& q = tx_[static_cast<std::size_t>(r.interface_id)];
        if (q.bytes + pkt.total_length > cfg_.link_queue_capacity_bytes) {
            v.kind = Verdict::Kind::Dropped;
            v.reason = DropReason::ShaperOverflow;
            return v;
        }
        q.bytes += pkt.total_length;
        q.fifo.push_back(std::move(pkt));
        v.kind = Verdict::Kind::Forwarded;
        v.interface_id = r.interface_id;
        v.next_hop = r.next_hop;
        return v;
    }

    // No usable route. DIP-marked packets park; plain IP drops on the spot.
    auto marking = decode_dscp(pkt.dscp);
    if (!cfg_.parking_enabled || !marking) {
        v.kind = Verdict::Kind::Dropped;
        v.reason = DropReason::NoRouteNonDip;
        return v;
    }
    Prefix key;
    if (r.kind == LookupResult::Kind::RoutedButDown && r.covering_next_hop != pkt.dst)
        key = r.covering;
    else
        key = Prefix::host(pkt.dst); // neighbor-scope miss (or no route at all)

    auto pr = store_.park(pkt, key, now, rng_);
    switch (pr.status) {
    case DisruptionStore::ParkResult::Status::Parked:
        v.kind = Verdict::Kind::Parked;
        v.evicted = std::move(pr.evicted);
        break;
    case DisruptionStore::ParkResult::Status::DroppedDuplicate:
        v.kind = Verdict::Kind::Dropped;
        v.reason = DropReason::Duplicate;
        break;
    case DisruptionStore::ParkResult::Status::DroppedFull:
        v.kind = Verdict::Kind::Dropped;
        v.reason = DropReason::QueueFull;
        break;
    }
    return v;
}

void DipNode::count_verdict(const Verdict& v) {
    switch (v.kind) {
    case Verdict::Kind::Delivered:
        ++counters_.delivered;
        break;
    case Verdict::Kind::Forwarded:
        ++counters_.forwarded;
        break;
    case Verdict::Kind::Parked:
        ++counters_.parks;
        break;
    case Verdict::Kind::Dropped:
        ++counters_.drops[static_cast<int>(v.reason)];
        break;
    }
    counters_.drops[static_cast<int>(DropReason::QueueFull)] += v.evicted.size();
}

void DipNode::on_topology_event(const TopologyEvent& ev, SimTime now) {
    (void)now;
    auto newly_usable = routing_.apply_event(ev);
    assert(newly_usable && "route-down for unknown prefix");
    if (!newly_usable || !cfg_.parking_enabled)
        return;
    for (const Prefix& p : *newly_usable) {
        if (std::find(active_drains_.begin(), active_drains_.end(), p) ==
            active_drains_.end())
            active_drains_.push_back(p);
    }
}

void DipNode::drain_pulse(SimTime now) {
    while (!active_drains_.empty()) {
        Prefix p = active_drains_.front();
        auto entry = routing_.route(p);
        if (!entry || !routing_.prefix_usable(p) || store_.empty_under(p)) {
            active_drains_.pop_front();
            continue;
        }
        const int iface = entry->interface_id;
        Shaper& shaper = shapers_[static_cast<std::size_t>(iface)];
        refill(shaper, now);
        std::uint64_t tokens = shaper.scaled / static_cast<std::uint64_t>(kUsecPerSec);
        const TxQueue& q = tx_[static_cast<std::size_t>(iface)];
        std::uint64_t headroom = cfg_.backpressure_threshold_bytes > q.bytes
                                     ? cfg_.backpressure_threshold_bytes - q.bytes
                                     : 0;
        std::uint64_t budget = std::min(tokens, headroom);
        if (budget == 0)
            return; // blocked; resume here next interval

        auto pkts = store_.drain(p, std::numeric_limits<std::size_t>::max(), budget, now);
        if (pkts.empty())
            return; // head packet larger than current budget

        std::uint64_t bytes = 0;
        for (const Packet& pkt : pkts)
            bytes += pkt.total_length;
        shaper.scaled -= bytes * static_cast<std::uint64_t>(kUsecPerSec);
        counters_.reinjected_packets += pkts.size();
        counters_.reinjected_bytes += bytes;

        for (Packet& pkt : pkts)
            dispose(std::move(pkt), now, true);

        // Round robin across simultaneously active prefixes.
        active_drains_.pop_front();
        if (!store_.empty_under(p))
            active_drains_.push_back(p);
        return;
    }
}

std::vector<Packet> DipNode::on_tick(SimTime now) {
    auto expired_ids = wheel_.tick(now);
    auto pkts = store_.expire(expired_ids);
    assert(pkts.size() == expired_ids.size());
    counters_.drops[static_cast<int>(DropReason::LifetimeExpired)] += pkts.size();
    if (hook_) {
        Verdict v;
        v.kind = Verdict::Kind::Dropped;
        v.reason = DropReason::LifetimeExpired;
        for (const Packet& pkt : pkts)
            hook_(pkt, v, now, false);
    }
    return pkts;
}

std::optional<Packet> DipNode::pop_tx(int iface) {
    TxQueue& q = tx_[static_cast<std::size_t>(iface)];
    if (q.fifo.empty())
        return std::nullopt;
    Packet pkt = std::move(q.fifo.front());
    q.fifo.pop_front();
    q.bytes -= pkt.total_length;
    return pkt;
}

bool DipNode::conservation_holds() const {
    // Forwarded packets still waiting in a tx queue have left the pipeline as
    // far as the node is concerned.
    return counters_.ingress == counters_.delivered + counters_.forwarded +
                                    store_.packets_live() + counters_.drops_total();
}

} // namespace dip
