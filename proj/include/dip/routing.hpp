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

#ifndef DIP_ROUTING_HH
#define DIP_ROUTING_HH

#include <map>
#include <optional>
#include <vector>

#include "dip/addr.hpp"
#include "dip/prefix_trie.hpp"
#include "dip/time.hpp"

namespace dip {

enum class RouteSource { Static, Dynamic, Scheduled };

struct RouteEntry {
    Ipv4Addr next_hop = 0;
    int interface_id = -1;
    bool up = false;
    RouteSource source = RouteSource::Static;
};

struct NeighborEntry {
    bool reachable = false;
    SimTime last_change = 0;
    int interface_id = -1;
};

// Routing protocols, ARP/ND, and contact schedules all reduce to one merged,
// time-ordered event stream at this interface.
struct TopologyEvent {
    enum class Kind { RouteUp, RouteDown, NeighborUp, NeighborDown };

    Kind kind = Kind::RouteUp;
    SimTime time = 0;
    // RouteUp / RouteDown
    Prefix prefix;
    Ipv4Addr next_hop = 0;
    int interface_id = -1;
    RouteSource source = RouteSource::Static;
    // NeighborUp / NeighborDown
    Ipv4Addr neighbor = 0;

    static TopologyEvent route_up(SimTime t, Prefix p, Ipv4Addr nh, int iface,
                                  RouteSource src = RouteSource::Static);
    static TopologyEvent route_down(SimTime t, Prefix p);
    static TopologyEvent neighbor_up(SimTime t, Ipv4Addr addr, int iface);
    static TopologyEvent neighbor_down(SimTime t, Ipv4Addr addr, int iface);
};

struct LookupResult {
    enum class Kind { Usable, RoutedButDown, NoRoute };

    Kind kind = Kind::NoRoute;
    // Usable
    Ipv4Addr next_hop = 0;
    int interface_id = -1;
    // Usable and RoutedButDown: the covering prefix (the parking key) and the
    // next hop it points at.
    Prefix covering;
    Ipv4Addr covering_next_hop = 0;
};

class RoutingTables {
  public:
    // Longest matching up-route with a reachable next hop wins; otherwise the
    // longest matching route of any state is reported as RoutedButDown.
    LookupResult lookup(Ipv4Addr dst) const;

    // Applies one event and returns the prefixes that transitioned from
    // unusable to usable as a consequence. nullopt on RouteDown for an
    // unknown prefix.
    std::optional<std::vector<Prefix>> apply_event(const TopologyEvent& ev);

    bool prefix_usable(const Prefix& p) const;
    std::optional<RouteEntry> route(const Prefix& p) const;
    bool neighbor_reachable(Ipv4Addr addr) const;
    std::optional<NeighborEntry> neighbor(Ipv4Addr addr) const;

    std::vector<Prefix> usable_prefixes() const;
    std::size_t route_count() const { return routes_.size(); }

  private:
    bool entry_usable(const RouteEntry& e) const;

    PrefixTrie<RouteEntry> routes_;
    std::map<Ipv4Addr, NeighborEntry> neighbors_;
};

} // namespace dip

#endif
