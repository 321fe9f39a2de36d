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

#include "dip/routing.hpp"

namespace dip {

TopologyEvent TopologyEvent::route_up(SimTime t, Prefix p, Ipv4Addr nh, int iface,
                                      RouteSource src) {
    TopologyEvent ev;
    ev.kind = Kind::RouteUp;
    ev.time = t;
    ev.prefix = p;
    ev.next_hop = nh;
    ev.interface_id = iface;
    ev.source = src;
    return ev;
}

TopologyEvent TopologyEvent::route_down(SimTime t, Prefix p) {
    TopologyEvent ev;
    ev.kind = Kind::RouteDown;
    ev.time = t;
    ev.prefix = p;
    return ev;
}

TopologyEvent TopologyEvent::neighbor_up(SimTime t, Ipv4Addr addr, int iface) {
    TopologyEvent ev;
    ev.kind = Kind::NeighborUp;
    ev.time = t;
    ev.neighbor = addr;
    ev.interface_id = iface;
    return ev;
}

TopologyEvent TopologyEvent::neighbor_down(SimTime t, Ipv4Addr addr, int iface) {
    TopologyEvent ev;
    ev.kind = Kind::NeighborDown;
    ev.time = t;
    ev.neighbor = addr;
    ev.interface_id = iface;
    return ev;
}

bool RoutingTables::entry_usable(const RouteEntry& e) const {
    return e.up && neighbor_reachable(e.next_hop);
}

bool RoutingTables::neighbor_reachable(Ipv4Addr addr) const {
    auto it = neighbors_.find(addr);
    return it != neighbors_.end() && it->second.reachable;
}

std::optional<NeighborEntry> RoutingTables::neighbor(Ipv4Addr addr) const {
    auto it = neighbors_.find(addr);
    if (it == neighbors_.end())
        return std::nullopt;
    return it->second;
}

LookupResult RoutingTables::lookup(Ipv4Addr dst) const {
    LookupResult result;
    bool have_usable = false;
    bool have_any = false;
    // for_each_match visits shortest prefix first, so the last hit of each
    // kind is the longest.
    routes_.for_each_match(dst, [&](const Prefix& p, const RouteEntry& e) {
        have_any = true;
        result.covering = p;
        result.covering_next_hop = e.next_hop;
        if (entry_usable(e)) {
            have_usable = true;
            result.kind = LookupResult::Kind::Usable;
            result.next_hop = e.next_hop;
            result.interface_id = e.interface_id;
        }
    });
    if (have_usable) {
        // covering may have been overwritten by a longer non-usable match;
        // rescan for the longest usable one.
        routes_.for_each_match(dst, [&](const Prefix& p, const RouteEntry& e) {
            if (entry_usable(e)) {
                result.covering = p;
                result.covering_next_hop = e.next_hop;
                result.next_hop = e.next_hop;
                result.interface_id = e.interface_id;
            }
        });
        result.kind = LookupResult::Kind::Usable;
    } else if (have_any) {
        result.kind = LookupResult::Kind::RoutedButDown;
    } else {
        result.kind = LookupResult::Kind::NoRoute;
    }
    return result;
}

std::optional<std::vector<Prefix>> RoutingTables::apply_event(const TopologyEvent& ev) {
    std::vector<Prefix> newly_usable;
    switch (ev.kind) {
    case TopologyEvent::Kind::RouteUp: {
        RouteEntry& e = routes_.find_or_insert(ev.prefix);
        bool was_usable = entry_usable(e);
        e.next_hop = ev.next_hop; // most recent update wins
        e.interface_id = ev.interface_id;
        e.source = ev.source;
        e.up = true;
        if (!was_usable && entry_usable(e))
            newly_usable.push_back(ev.prefix);
        break;
    }
    case TopologyEvent::Kind::RouteDown: {
        RouteEntry* e = routes_.find(ev.prefix);
        if (!e)
            return std::nullopt; // unknown route
        e->up = false;
        break;
    }
    case TopologyEvent::Kind::NeighborUp: {
        NeighborEntry& n = neighbors_[ev.neighbor];
        bool was_reachable = n.reachable;
        n.reachable = true;
        n.last_change = ev.time;
        n.interface_id = ev.interface_id;
        if (!was_reachable) {
            routes_.for_each([&](const Prefix& p, RouteEntry& e) {
                if (e.up && e.next_hop == ev.neighbor)
                    newly_usable.push_back(p);
            });
        }
        break;
    }
    case TopologyEvent::Kind::NeighborDown: {
        NeighborEntry& n = neighbors_[ev.neighbor];
        n.reachable = false;
        n.last_change = ev.time;
        n.interface_id = ev.interface_id;
        break;
    }
    }
    return newly_usable;
}

bool RoutingTables::prefix_usable(const Prefix& p) const {
    const RouteEntry* e = routes_.find(p);
    return e && entry_usable(*e);
}

std::optional<RouteEntry> RoutingTables::route(const Prefix& p) const {
    const RouteEntry* e = routes_.find(p);
    if (!e)
        return std::nullopt;
    return *e;
}

std::vector<Prefix> RoutingTables::usable_prefixes() const {
    std::vector<Prefix> out;
    routes_.for_each([&](const Prefix& p, RouteEntry& e) {
        if (entry_usable(e))
            out.push_back(p);
    });
    return out;
}

} // namespace dip
