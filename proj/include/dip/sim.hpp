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

#ifndef DIP_SIM_HH
#define DIP_SIM_HH

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dip/engine.hpp"

namespace dip {

// Scenario problems carry the offending field so the CLI can print
// "section name: key: message" diagnostics.
class ScenarioError : public std::runtime_error {
  public:
    ScenarioError(std::string field_path, const std::string& message)
        : std::runtime_error(field_path + ": " + message),
          field_path_(std::move(field_path)) {}
    const std::string& field_path() const { return field_path_; }

  private:
    std::string field_path_;
};

struct DetectionLatency {
    SimTime up = 0;
    SimTime down = 0;
};

struct NodeSpec {
    NodeConfig config;
    DetectionLatency detection;
};

struct PeriodicSchedule {
    SimTime period = 0;
    SimTime up_start = 0;
    SimTime up_end = 0;
};

struct LinkSpec {
    enum class ScheduleKind { AlwaysUp, AlwaysDown, Intervals };

    std::string name;
    int node_a = -1;
    int node_b = -1;
    std::uint64_t bandwidth_bytes_per_s = 125000;
    SimTime propagation_delay = milliseconds(1);
    ScheduleKind schedule_kind = ScheduleKind::AlwaysUp;
    std::vector<std::pair<SimTime, SimTime>> up_intervals; // disjoint, sorted
    std::optional<PeriodicSchedule> periodic; // expands into up_intervals
};

struct RouteSpec {
    int node = -1;
    Prefix prefix;
    Ipv4Addr next_hop = 0;
    RouteSource source = RouteSource::Static;
    // Scheduled routes (contact plans) come up and down at these times;
    // static routes are installed once at t=0.
    std::vector<std::pair<SimTime, SimTime>> up_intervals;
};

struct FlowSpec {
    std::string name;
    int src_node = -1;
    int dst_node = -1;
    std::uint16_t packet_size_bytes = 100; // includes the 20-byte header
    double rate_pps = 1.0;
    SimTime start = 0;
    SimTime end = 0;
    std::uint8_t service_class = 0;
    Longevity longevity = Longevity::Days;
    int retransmit = 1; // copies per emission; 1 = no duplicates
    std::uint8_t protocol = 17;
};

struct Scenario {
    std::string name = "scenario";
    SimTime duration = 0;
    std::uint64_t seed = 1;
    bool plain_ip = false; // parking disabled everywhere
    bool collect_events = false;
    std::vector<NodeSpec> nodes;
    std::vector<LinkSpec> links;
    std::vector<RouteSpec> routes;
    std::vector<FlowSpec> flows;

    int node_index(const std::string& name) const;
};

// Throws ScenarioError on the first problem found.
void validate_scenario(const Scenario& s);

// Materializes a link's up intervals over [0, duration), expanding a periodic
// schedule when one is set.
std::vector<std::pair<SimTime, SimTime>> expand_schedule(const LinkSpec& link,
                                                         SimTime duration);

// Time-ordered event queue; ties broken by insertion sequence so the
// execution order (and therefore every report) is deterministic.
template <typename E>
class EventQueue {
  public:
    struct Item {
        SimTime t;
        std::uint64_t seq;
        E event;
    };

    void push(SimTime t, E event) {
        heap_.push_back(Item{t, next_seq_++, std::move(event)});
        std::push_heap(heap_.begin(), heap_.end(), later);
    }

    bool empty() const { return heap_.empty(); }
    SimTime next_time() const { return heap_.front().t; }

    Item pop() {
        std::pop_heap(heap_.begin(), heap_.end(), later);
        Item item = std::move(heap_.back());
        heap_.pop_back();
        return item;
    }

    // Remaining (unexecuted) items; used for end-of-run accounting.
    const std::vector<Item>& pending() const { return heap_; }

  private:
    static bool later(const Item& a, const Item& b) {
        return a.t != b.t ? a.t > b.t : a.seq > b.seq;
    }

    std::vector<Item> heap_;
    std::uint64_t next_seq_ = 0;
};

struct NodeMetrics {
    std::string name;
    NodeCounters counters;
    std::uint64_t parked_end_packets = 0;
    std::uint64_t parked_end_bytes = 0;
};

struct FlowMetrics {
    std::string name;
    std::string src;
    std::string dst;
    std::uint64_t emitted_unique = 0;
    std::uint64_t emitted_copies = 0;
    std::uint64_t delivered_unique = 0;
    std::uint64_t delivered_copies = 0;
    double delivery_ratio = 0.0;
    SimTime latency_min_us = 0;
    SimTime latency_max_us = 0;
    SimTime latency_p95_us = 0;
    double latency_mean_us = 0.0;
};

struct LinkMetrics {
    std::string name;
    std::uint64_t bytes_carried = 0;
    std::uint64_t packets_carried = 0;
    std::uint64_t lost_mid_transmission = 0;
    std::uint64_t lost_detection_window = 0;
};

struct OccupancySample {
    SimTime t = 0;
    std::string node;
    std::uint64_t store_bytes = 0;
    std::uint64_t store_packets = 0;
};

// One record per packet disposition; collected when
// Scenario::collect_events is set and written as JSON lines.
struct VerdictEvent {
    SimTime t = 0;
    std::string node;
    std::string verdict; // deliver | forward | park | drop
    std::string reason;  // drop reason, empty otherwise
    int flow = -1;
    std::int64_t seq = -1;
    bool reinjected = false;
};

struct MetricsReport {
    std::string scenario_name;
    std::uint64_t seed = 0;
    std::string mode; // dip | plain-ip
    SimTime duration = 0;

    std::vector<NodeMetrics> nodes;
    std::vector<FlowMetrics> flows;
    std::vector<LinkMetrics> links;
    std::vector<OccupancySample> occupancy;
    std::vector<VerdictEvent> events;

    std::uint64_t emitted_copies_total = 0;
    std::uint64_t delivered_copies_total = 0;
    std::uint64_t parked_end_total = 0;
    std::uint64_t inflight_end_total = 0;
    std::uint64_t dropped_total = 0; // node drops plus link losses
};

// emitted == delivered + parked + in-flight + dropped
bool conservation_holds(const MetricsReport& r);

MetricsReport run(const Scenario& scenario);

struct MuleParams {
    SimTime contact = seconds(60);
    SimTime gap = seconds(240);
    std::uint64_t bandwidth_bytes_per_s = 125000;
    SimTime propagation_delay = milliseconds(1);
    double flow_rate_pps = 1.0;
    std::uint16_t packet_size_bytes = 100;
    std::uint8_t service_class = 0;
    Longevity longevity = Longevity::Days;
    SimTime duration = seconds(7200);
    // Default leaves one full mule period between last emission and the end.
    std::optional<SimTime> flow_end;
    std::uint64_t seed = 1;
};

// Three nodes (house A, mule, house B) and two anti-phased links such that at
// most one of them is up at any instant. The mule period is
// 2 * (contact + gap).
Scenario build_data_mule(const MuleParams& params);

} // namespace dip

#endif
