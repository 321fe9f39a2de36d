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

#include "dip/scenario_text.hpp"

#include <charconv>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace dip {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ScenarioError(path, msg);
}

std::uint64_t parse_u64(const std::string& path, const std::string& v) {
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        fail(path, "expected an unsigned integer, got '" + v + "'");
    return out;
}

double parse_f64(const std::string& path, const std::string& v) {
    try {
        std::size_t pos = 0;
        double out = std::stod(v, &pos);
        if (pos != v.size() || !std::isfinite(out))
            fail(path, "expected a number, got '" + v + "'");
        return out;
    } catch (const std::logic_error&) {
        fail(path, "expected a number, got '" + v + "'");
    }
}

SimTime parse_seconds(const std::string& path, const std::string& v) {
    double s = parse_f64(path, v);
    if (s < 0)
        fail(path, "must not be negative");
    return static_cast<SimTime>(std::llround(s * 1e6));
}

bool parse_bool(const std::string& path, const std::string& v) {
    if (v == "on" || v == "true" || v == "1")
        return true;
    if (v == "off" || v == "false" || v == "0")
        return false;
    fail(path, "expected on/off, got '" + v + "'");
}

Ipv4Addr parse_addr(const std::string& path, const std::string& v) {
    auto a = parse_ipv4(v);
    if (!a)
        fail(path, "expected an IPv4 address, got '" + v + "'");
    return *a;
}

std::pair<SimTime, SimTime> parse_interval(const std::string& path, const std::string& v) {
    auto colon = v.find(':');
    if (colon == std::string::npos)
        fail(path, "expected start_s:end_s, got '" + v + "'");
    return {parse_seconds(path, trim(v.substr(0, colon))),
            parse_seconds(path, trim(v.substr(colon + 1)))};
}

std::string format_seconds(SimTime t) {
    // Exact decimal: integral seconds plus up to six fractional digits.
    char buf[40];
    std::int64_t whole = t / kUsecPerSec;
    std::int64_t frac = t % kUsecPerSec;
    if (frac == 0) {
        std::snprintf(buf, sizeof(buf), "%" PRId64, whole);
        return buf;
    }
    std::snprintf(buf, sizeof(buf), "%" PRId64 ".%06" PRId64, whole, frac);
    std::string out = buf;
    while (out.back() == '0')
        out.pop_back();
    return out;
}

std::string format_f64(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Engine/detection keys shared by [defaults] and [node] sections. Returns
// false when the key is not one of them.
bool apply_node_key(NodeSpec& n, const std::string& path, const std::string& key,
                    const std::string& value) {
    NodeConfig& c = n.config;
    if (key == "parking")
        c.parking_enabled = parse_bool(path, value);
    else if (key == "shaper_rate_bytes_per_s")
        c.shaper.rate_bytes_per_s = parse_u64(path, value);
    else if (key == "shaper_burst_bytes")
        c.shaper.burst_bytes = parse_u64(path, value);
    else if (key == "pacing_interval_s")
        c.pacing_interval = parse_seconds(path, value);
    else if (key == "backpressure_threshold_bytes")
        c.backpressure_threshold_bytes = parse_u64(path, value);
    else if (key == "link_queue_capacity_bytes")
        c.link_queue_capacity_bytes = parse_u64(path, value);
    else if (key == "tick_granularity_s")
        c.tick_granularity = parse_seconds(path, value);
    else if (key == "store_capacity_bytes")
        c.store.byte_capacity = parse_u64(path, value);
    else if (key == "bucket_count")
        c.store.bucket_count = static_cast<int>(parse_u64(path, value));
    else if (key == "bucket_packet_limit")
        c.store.bucket_packet_limit = parse_u64(path, value);
    else if (key == "bucket_byte_limit")
        c.store.bucket_byte_limit = parse_u64(path, value);
    else if (key == "drop_policy") {
        if (value == "taildrop")
            c.store.policy = DropPolicyKind::TailDrop;
        else if (value == "headdrop")
            c.store.policy = DropPolicyKind::HeadDrop;
        else if (value == "red")
            c.store.policy = DropPolicyKind::Red;
        else
            fail(path, "expected taildrop/headdrop/red, got '" + value + "'");
    } else if (key == "red_min_th")
        c.store.red.min_th = parse_f64(path, value);
    else if (key == "red_max_th")
        c.store.red.max_th = parse_f64(path, value);
    else if (key == "red_max_p")
        c.store.red.max_p = parse_f64(path, value);
    else if (key == "red_ewma_weight")
        c.store.red.ewma_weight = parse_f64(path, value);
    else if (key == "bloom_capacity")
        c.bloom_capacity = parse_u64(path, value);
    else if (key == "bloom_target_fpr")
        c.bloom_target_fpr = parse_f64(path, value);
    else if (key == "detection_up_latency_s")
        n.detection.up = parse_seconds(path, value);
    else if (key == "detection_down_latency_s")
        n.detection.down = parse_seconds(path, value);
    else
        return false;
    return true;
}

const char* policy_name(DropPolicyKind k) {
    switch (k) {
    case DropPolicyKind::TailDrop: return "taildrop";
    case DropPolicyKind::HeadDrop: return "headdrop";
    case DropPolicyKind::Red: return "red";
    }
    return "?";
}

std::vector<std::pair<std::string, std::string>> node_engine_entries(const NodeSpec& n) {
    const NodeConfig& c = n.config;
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back("parking", c.parking_enabled ? "on" : "off");
    out.emplace_back("shaper_rate_bytes_per_s", std::to_string(c.shaper.rate_bytes_per_s));
    out.emplace_back("shaper_burst_bytes", std::to_string(c.shaper.burst_bytes));
    out.emplace_back("pacing_interval_s", format_seconds(c.pacing_interval));
    out.emplace_back("backpressure_threshold_bytes",
                     std::to_string(c.backpressure_threshold_bytes));
    out.emplace_back("link_queue_capacity_bytes",
                     std::to_string(c.link_queue_capacity_bytes));
    out.emplace_back("tick_granularity_s", format_seconds(c.tick_granularity));
    out.emplace_back("store_capacity_bytes", std::to_string(c.store.byte_capacity));
    out.emplace_back("bucket_count", std::to_string(c.store.bucket_count));
    out.emplace_back("bucket_packet_limit", std::to_string(c.store.bucket_packet_limit));
    out.emplace_back("bucket_byte_limit", std::to_string(c.store.bucket_byte_limit));
    out.emplace_back("drop_policy", policy_name(c.store.policy));
    out.emplace_back("red_min_th", format_f64(c.store.red.min_th));
    out.emplace_back("red_max_th", format_f64(c.store.red.max_th));
    out.emplace_back("red_max_p", format_f64(c.store.red.max_p));
    out.emplace_back("red_ewma_weight", format_f64(c.store.red.ewma_weight));
    out.emplace_back("bloom_capacity", std::to_string(c.bloom_capacity));
    out.emplace_back("bloom_target_fpr", format_f64(c.bloom_target_fpr));
    out.emplace_back("detection_up_latency_s", format_seconds(n.detection.up));
    out.emplace_back("detection_down_latency_s", format_seconds(n.detection.down));
    return out;
}

} // namespace

RawScenario parse_scenario_text(const std::string& text) {
    RawScenario raw;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                fail("line " + std::to_string(lineno), "unterminated section header");
            std::string inner = trim(line.substr(1, line.size() - 2));
            RawSection sec;
            sec.line = lineno;
            auto space = inner.find(' ');
            if (space == std::string::npos) {
                sec.kind = inner;
            } else {
                sec.kind = inner.substr(0, space);
                sec.name = trim(inner.substr(space + 1));
            }
            if (sec.kind.empty())
                fail("line " + std::to_string(lineno), "empty section header");
            raw.sections.push_back(std::move(sec));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            fail("line " + std::to_string(lineno), "expected 'key = value'");
        if (raw.sections.empty())
            fail("line " + std::to_string(lineno), "key outside of any section");
        RawEntry e;
        e.key = trim(line.substr(0, eq));
        e.value = trim(line.substr(eq + 1));
        e.line = lineno;
        if (e.key.empty())
            fail("line " + std::to_string(lineno), "empty key");
        raw.sections.back().entries.push_back(std::move(e));
    }
    return raw;
}

Scenario compile_scenario(const RawScenario& raw) {
    Scenario s;
    NodeSpec defaults;

    for (const RawSection& sec : raw.sections) {
        if (sec.kind != "scenario" && sec.kind != "defaults" && sec.kind != "node" &&
            sec.kind != "link" && sec.kind != "route" && sec.kind != "flow")
            fail("line " + std::to_string(sec.line),
                 "unknown section '" + sec.kind + "'");
    }

    // defaults first, independent of file position
    for (const RawSection& sec : raw.sections) {
        if (sec.kind != "defaults")
            continue;
        for (const RawEntry& e : sec.entries) {
            const std::string path = "defaults: " + e.key;
            if (!apply_node_key(defaults, path, e.key, e.value))
                fail(path, "unknown key");
        }
    }

    for (const RawSection& sec : raw.sections) {
        if (sec.kind == "scenario") {
            for (const RawEntry& e : sec.entries) {
                const std::string path = "scenario: " + e.key;
                if (e.key == "name")
                    s.name = e.value;
                else if (e.key == "duration_s")
                    s.duration = parse_seconds(path, e.value);
                else if (e.key == "seed")
                    s.seed = parse_u64(path, e.value);
                else if (e.key == "mode") {
                    if (e.value == "dip")
                        s.plain_ip = false;
                    else if (e.value == "plain-ip")
                        s.plain_ip = true;
                    else
                        fail(path, "expected dip or plain-ip, got '" + e.value + "'");
                } else
                    fail(path, "unknown key");
            }
        } else if (sec.kind == "node") {
            NodeSpec n = defaults;
            n.config.name = sec.name;
            if (sec.name.empty())
                fail("line " + std::to_string(sec.line), "node section needs a name");
            for (const RawEntry& e : sec.entries) {
                const std::string path = "node " + sec.name + ": " + e.key;
                if (e.key == "addr")
                    n.config.addr = parse_addr(path, e.value);
                else if (!apply_node_key(n, path, e.key, e.value))
                    fail(path, "unknown key");
            }
            s.nodes.push_back(std::move(n));
        }
    }

    auto node_index = [&](const std::string& path, const std::string& name) {
        int idx = s.node_index(name);
        if (idx < 0)
            fail(path, "unknown node '" + name + "'");
        return idx;
    };

    int route_count = 0;
    for (const RawSection& sec : raw.sections) {
        if (sec.kind == "link") {
            LinkSpec l;
            l.name = sec.name.empty()
                         ? "link" + std::to_string(s.links.size())
                         : sec.name;
            bool scheduled_keys = false;
            PeriodicSchedule periodic;
            bool have_periodic = false;
            std::string state;
            for (const RawEntry& e : sec.entries) {
                const std::string path = "link " + l.name + ": " + e.key;
                if (e.key == "node_a")
                    l.node_a = node_index(path, e.value);
                else if (e.key == "node_b")
                    l.node_b = node_index(path, e.value);
                else if (e.key == "bandwidth_bytes_per_s")
                    l.bandwidth_bytes_per_s = parse_u64(path, e.value);
                else if (e.key == "propagation_delay_s")
                    l.propagation_delay = parse_seconds(path, e.value);
                else if (e.key == "state")
                    state = e.value;
                else if (e.key == "up_interval") {
                    l.up_intervals.push_back(parse_interval(path, e.value));
                    scheduled_keys = true;
                } else if (e.key == "schedule_period_s") {
                    periodic.period = parse_seconds(path, e.value);
                    have_periodic = true;
                } else if (e.key == "schedule_up_start_s") {
                    periodic.up_start = parse_seconds(path, e.value);
                    have_periodic = true;
                } else if (e.key == "schedule_up_end_s") {
                    periodic.up_end = parse_seconds(path, e.value);
                    have_periodic = true;
                } else
                    fail(path, "unknown key");
            }
            if (have_periodic) {
                l.periodic = periodic;
                scheduled_keys = true;
            }
            if (state == "always_up")
                l.schedule_kind = LinkSpec::ScheduleKind::AlwaysUp;
            else if (state == "always_down")
                l.schedule_kind = LinkSpec::ScheduleKind::AlwaysDown;
            else if (state == "scheduled" || (state.empty() && scheduled_keys))
                l.schedule_kind = LinkSpec::ScheduleKind::Intervals;
            else if (state.empty())
                l.schedule_kind = LinkSpec::ScheduleKind::AlwaysUp;
            else
                fail("link " + l.name + ": state",
                     "expected always_up/always_down/scheduled, got '" + state + "'");
            s.links.push_back(std::move(l));
        } else if (sec.kind == "route") {
            RouteSpec r;
            ++route_count;
            const std::string rname =
                sec.name.empty() ? "r" + std::to_string(route_count - 1) : sec.name;
            bool have_prefix = false;
            for (const RawEntry& e : sec.entries) {
                const std::string path = "route " + rname + ": " + e.key;
                if (e.key == "node")
                    r.node = node_index(path, e.value);
                else if (e.key == "prefix") {
                    auto p = parse_prefix(e.value);
                    if (!p)
                        fail(path, "expected addr/len, got '" + e.value + "'");
                    r.prefix = *p;
                    have_prefix = true;
                } else if (e.key == "next_hop")
                    r.next_hop = parse_addr(path, e.value);
                else if (e.key == "source") {
                    if (e.value == "static")
                        r.source = RouteSource::Static;
                    else if (e.value == "dynamic")
                        r.source = RouteSource::Dynamic;
                    else if (e.value == "scheduled")
                        r.source = RouteSource::Scheduled;
                    else
                        fail(path, "expected static/dynamic/scheduled");
                } else if (e.key == "up_interval")
                    r.up_intervals.push_back(parse_interval(path, e.value));
                else
                    fail(path, "unknown key");
            }
            if (r.node < 0)
                fail("route " + rname + ": node", "missing");
            if (!have_prefix)
                fail("route " + rname + ": prefix", "missing");
            if (r.next_hop == 0)
                fail("route " + rname + ": next_hop", "missing");
            s.routes.push_back(std::move(r));
        } else if (sec.kind == "flow") {
            FlowSpec f;
            f.name = sec.name.empty() ? "f" + std::to_string(s.flows.size()) : sec.name;
            for (const RawEntry& e : sec.entries) {
                const std::string path = "flow " + f.name + ": " + e.key;
                if (e.key == "src")
                    f.src_node = node_index(path, e.value);
                else if (e.key == "dst")
                    f.dst_node = node_index(path, e.value);
                else if (e.key == "packet_size_bytes")
                    f.packet_size_bytes =
                        static_cast<std::uint16_t>(parse_u64(path, e.value));
                else if (e.key == "rate_pps")
                    f.rate_pps = parse_f64(path, e.value);
                else if (e.key == "start_s")
                    f.start = parse_seconds(path, e.value);
                else if (e.key == "end_s")
                    f.end = parse_seconds(path, e.value);
                else if (e.key == "service_class")
                    f.service_class = static_cast<std::uint8_t>(parse_u64(path, e.value));
                else if (e.key == "longevity") {
                    auto l = longevity_from_name(e.value);
                    if (!l)
                        fail(path, "expected seconds/minutes/hours/days");
                    f.longevity = *l;
                } else if (e.key == "retransmit")
                    f.retransmit = static_cast<int>(parse_u64(path, e.value));
                else if (e.key == "protocol")
                    f.protocol = static_cast<std::uint8_t>(parse_u64(path, e.value));
                else
                    fail(path, "unknown key");
            }
            s.flows.push_back(std::move(f));
        }
    }

    validate_scenario(s);
    return s;
}

std::string format_scenario(const Scenario& s) {
    std::ostringstream out;
    out << "[scenario]\n";
    out << "name = " << s.name << "\n";
    out << "duration_s = " << format_seconds(s.duration) << "\n";
    out << "seed = " << s.seed << "\n";
    out << "mode = " << (s.plain_ip ? "plain-ip" : "dip") << "\n";

    // Defaults from the first node keep per-node sections small.
    NodeSpec base;
    if (!s.nodes.empty()) {
        base = s.nodes.front();
        out << "\n[defaults]\n";
        for (const auto& [k, v] : node_engine_entries(base))
            out << k << " = " << v << "\n";
    }
    for (const NodeSpec& n : s.nodes) {
        out << "\n[node " << n.config.name << "]\n";
        out << "addr = " << format_ipv4(n.config.addr) << "\n";
        auto mine = node_engine_entries(n);
        auto defs = node_engine_entries(base);
        for (std::size_t i = 0; i < mine.size(); ++i)
            if (mine[i] != defs[i])
                out << mine[i].first << " = " << mine[i].second << "\n";
    }
    for (const LinkSpec& l : s.links) {
        out << "\n[link " << l.name << "]\n";
        out << "node_a = " << s.nodes[l.node_a].config.name << "\n";
        out << "node_b = " << s.nodes[l.node_b].config.name << "\n";
        out << "bandwidth_bytes_per_s = " << l.bandwidth_bytes_per_s << "\n";
        out << "propagation_delay_s = " << format_seconds(l.propagation_delay) << "\n";
        switch (l.schedule_kind) {
        case LinkSpec::ScheduleKind::AlwaysUp:
            out << "state = always_up\n";
            break;
        case LinkSpec::ScheduleKind::AlwaysDown:
            out << "state = always_down\n";
            break;
        case LinkSpec::ScheduleKind::Intervals:
            out << "state = scheduled\n";
            if (l.periodic) {
                out << "schedule_period_s = " << format_seconds(l.periodic->period) << "\n";
                out << "schedule_up_start_s = " << format_seconds(l.periodic->up_start)
                    << "\n";
                out << "schedule_up_end_s = " << format_seconds(l.periodic->up_end) << "\n";
            } else {
                for (const auto& [a, b] : l.up_intervals)
                    out << "up_interval = " << format_seconds(a) << ":"
                        << format_seconds(b) << "\n";
            }
            break;
        }
    }
    int ri = 0;
    for (const RouteSpec& r : s.routes) {
        out << "\n[route r" << ri++ << "]\n";
        out << "node = " << s.nodes[r.node].config.name << "\n";
        out << "prefix = " << r.prefix.str() << "\n";
        out << "next_hop = " << format_ipv4(r.next_hop) << "\n";
        if (r.source == RouteSource::Dynamic)
            out << "source = dynamic\n";
        else if (r.source == RouteSource::Scheduled)
            out << "source = scheduled\n";
        for (const auto& [a, b] : r.up_intervals)
            out << "up_interval = " << format_seconds(a) << ":" << format_seconds(b)
                << "\n";
    }
    for (const FlowSpec& f : s.flows) {
        out << "\n[flow " << f.name << "]\n";
        out << "src = " << s.nodes[f.src_node].config.name << "\n";
        out << "dst = " << s.nodes[f.dst_node].config.name << "\n";
        out << "packet_size_bytes = " << f.packet_size_bytes << "\n";
        out << "rate_pps = " << format_f64(f.rate_pps) << "\n";
        out << "start_s = " << format_seconds(f.start) << "\n";
        out << "end_s = " << format_seconds(f.end) << "\n";
        out << "service_class = " << static_cast<int>(f.service_class) << "\n";
        out << "longevity = " << longevity_name(f.longevity) << "\n";
        out << "retransmit = " << f.retransmit << "\n";
        out << "protocol = " << static_cast<int>(f.protocol) << "\n";
    }
    return out.str();
}

RawScenario parse_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ScenarioError("file " + path, "cannot open scenario file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str());
}

Scenario load_scenario_file(const std::string& path) {
    return compile_scenario(parse_scenario_file(path));
}

void apply_override(RawScenario& raw, const std::string& path, const std::string& value) {
    // scenario.<key> | defaults.<key> | <kind>.<name>.<key>
    auto first = path.find('.');
    if (first == std::string::npos)
        fail("override " + path, "expected section.key or section.name.key");
    std::string kind = path.substr(0, first);
    std::string name;
    std::string key;
    if (kind == "scenario" || kind == "defaults") {
        key = path.substr(first + 1);
    } else {
        auto second = path.find('.', first + 1);
        if (second == std::string::npos)
            fail("override " + path, "expected section.name.key");
        name = path.substr(first + 1, second - first - 1);
        key = path.substr(second + 1);
    }
    if (key.empty())
        fail("override " + path, "empty key");

    RawSection* target = nullptr;
    for (RawSection& sec : raw.sections)
        if (sec.kind == kind && (name.empty() || sec.name == name))
            target = &sec;
    if (!target) {
        if (kind == "scenario" || kind == "defaults") {
            RawSection sec;
            sec.kind = kind;
            raw.sections.insert(raw.sections.begin(), std::move(sec));
            target = &raw.sections.front();
        } else {
            fail("override " + path, "no such section");
        }
    }
    std::erase_if(target->entries, [&](const RawEntry& e) { return e.key == key; });
    target->entries.push_back(RawEntry{key, value, 0});
}

} // namespace dip
