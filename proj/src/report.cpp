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

#include "dip/report.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace dip {

namespace {

std::string fmt_ratio(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string fmt_mean(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << content;
}

} // namespace

std::string nodes_csv(const MetricsReport& r) {
    std::ostringstream out;
    out << "node,ingress,delivered,forwarded,parks,reinjected_packets,"
           "reinjected_bytes,parked_end_packets,parked_end_bytes,"
           "drop_ttl_expired,drop_lifetime_expired,drop_duplicate,drop_queue_full,"
           "drop_no_route_non_dip,drop_malformed_header,drop_shaper_overflow\n";
    for (const NodeMetrics& n : r.nodes) {
        const NodeCounters& c = n.counters;
        out << n.name << ',' << c.ingress << ',' << c.delivered << ',' << c.forwarded
            << ',' << c.parks << ',' << c.reinjected_packets << ','
            << c.reinjected_bytes << ',' << n.parked_end_packets << ','
            << n.parked_end_bytes;
        for (int i = 0; i < kDropReasonCount; ++i)
            out << ',' << c.drops[i];
        out << '\n';
    }
    return out.str();
}

std::string flows_csv(const MetricsReport& r) {
    std::ostringstream out;
    out << "flow,src,dst,emitted_unique,emitted_copies,delivered_unique,"
           "delivered_copies,delivery_ratio,latency_min_us,latency_mean_us,"
           "latency_max_us,latency_p95_us\n";
    for (const FlowMetrics& f : r.flows) {
        out << f.name << ',' << f.src << ',' << f.dst << ',' << f.emitted_unique << ','
            << f.emitted_copies << ',' << f.delivered_unique << ','
            << f.delivered_copies << ',' << fmt_ratio(f.delivery_ratio) << ','
            << f.latency_min_us << ',' << fmt_mean(f.latency_mean_us) << ','
            << f.latency_max_us << ',' << f.latency_p95_us << '\n';
    }
    return out.str();
}

std::string links_csv(const MetricsReport& r) {
    std::ostringstream out;
    out << "link,bytes_carried,packets_carried,lost_mid_transmission,"
           "lost_detection_window\n";
    for (const LinkMetrics& l : r.links) {
        out << l.name << ',' << l.bytes_carried << ',' << l.packets_carried << ','
            << l.lost_mid_transmission << ',' << l.lost_detection_window << '\n';
    }
    return out.str();
}

std::string occupancy_csv(const MetricsReport& r) {
    std::ostringstream out;
    out << "time_us,node,store_bytes,store_packets\n";
    for (const OccupancySample& s : r.occupancy)
        out << s.t << ',' << s.node << ',' << s.store_bytes << ',' << s.store_packets
            << '\n';
    return out.str();
}

std::string events_jsonl(const MetricsReport& r) {
    std::ostringstream out;
    for (const VerdictEvent& e : r.events) {
        out << "{\"t_us\":" << e.t << ",\"node\":\"" << e.node << "\",\"verdict\":\""
            << e.verdict << "\",\"reason\":\"" << e.reason << "\",\"flow\":" << e.flow
            << ",\"seq\":" << e.seq
            << ",\"reinjected\":" << (e.reinjected ? "true" : "false") << "}\n";
    }
    return out.str();
}

std::string serialize_report(const MetricsReport& r) {
    std::ostringstream out;
    out << "# scenario=" << r.scenario_name << " seed=" << r.seed << " mode=" << r.mode
        << " duration_us=" << r.duration << '\n';
    out << "# emitted=" << r.emitted_copies_total
        << " delivered=" << r.delivered_copies_total << " parked=" << r.parked_end_total
        << " inflight=" << r.inflight_end_total << " dropped=" << r.dropped_total
        << '\n';
    out << nodes_csv(r) << flows_csv(r) << links_csv(r) << occupancy_csv(r);
    return out.str();
}

std::string summary_text(const MetricsReport& r) {
    std::ostringstream out;
    out << "scenario " << r.scenario_name << " (mode " << r.mode << ", seed " << r.seed
        << ", duration " << r.duration / kUsecPerSec << " s)\n";
    out << "  emitted " << r.emitted_copies_total << ", delivered "
        << r.delivered_copies_total << ", parked-at-end " << r.parked_end_total
        << ", in-flight " << r.inflight_end_total << ", dropped " << r.dropped_total
        << "\n";
    for (const FlowMetrics& f : r.flows) {
        out << "  flow " << f.name << " " << f.src << "->" << f.dst << ": "
            << f.delivered_unique << "/" << f.emitted_unique << " delivered (ratio "
            << fmt_ratio(f.delivery_ratio) << ")";
        if (f.delivered_unique > 0)
            out << ", latency us min/mean/max/p95 = " << f.latency_min_us << "/"
                << fmt_mean(f.latency_mean_us) << "/" << f.latency_max_us << "/"
                << f.latency_p95_us;
        out << "\n";
    }
    return out.str();
}

void write_report_files(const MetricsReport& r, const std::string& dir,
                        bool with_events) {
    std::filesystem::path base(dir);
    std::filesystem::create_directories(base);
    write_file(base / "nodes.csv", nodes_csv(r));
    write_file(base / "flows.csv", flows_csv(r));
    write_file(base / "links.csv", links_csv(r));
    write_file(base / "occupancy.csv", occupancy_csv(r));
    if (with_events)
        write_file(base / "events.jsonl", events_jsonl(r));
}

std::vector<std::vector<std::string>> read_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::vector<std::string> row;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, ','))
            row.push_back(field);
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace dip
