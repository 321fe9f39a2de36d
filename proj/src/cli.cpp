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

#include "dip/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "dip/report.hpp"
#include "dip/scenario_text.hpp"
#include "dip/sim.hpp"

namespace dip {

namespace {

struct SweepAxis {
    std::string path;
    std::vector<std::string> values;
};

SweepAxis parse_set(const std::string& spec) {
    auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 >= spec.size())
        throw CLI::ValidationError("--set", "expected path=v1,v2,... got '" + spec + "'");
    SweepAxis axis;
    axis.path = spec.substr(0, eq);
    std::string rest = spec.substr(eq + 1);
    std::size_t pos = 0;
    while (pos <= rest.size()) {
        auto comma = rest.find(',', pos);
        if (comma == std::string::npos) {
            axis.values.push_back(rest.substr(pos));
            break;
        }
        axis.values.push_back(rest.substr(pos, comma - pos));
        pos = comma + 1;
    }
    if (axis.values.empty())
        throw CLI::ValidationError("--set", "no values in '" + spec + "'");
    return axis;
}

std::string format_seconds_arg(double s) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", s);
    return buf;
}

} // namespace

int cli_main(const std::vector<std::string>& args) {
    CLI::App app{"dip: disruption-tolerant IP forwarding engine and simulator"};
    app.require_subcommand(1);

    // --- run ---------------------------------------------------------------
    auto* run_cmd = app.add_subcommand("run", "execute a scenario and write reports");
    std::string scenario_path;
    std::string out_dir = "dip-report";
    std::optional<std::uint64_t> seed;
    std::optional<double> duration_s;
    std::string mode;
    bool events = false;
    run_cmd->add_option("scenario", scenario_path, "scenario file")->required();
    run_cmd->add_option("--out", out_dir, "report output directory");
    run_cmd->add_option("--seed", seed, "seed override");
    run_cmd->add_option("--duration-s", duration_s, "duration override (seconds)");
    run_cmd->add_option("--mode", mode, "dip or plain-ip")
        ->check(CLI::IsMember({"dip", "plain-ip"}));
    run_cmd->add_flag("--events", events, "also write events.jsonl (one object per verdict)");

    // --- validate ----------------------------------------------------------
    auto* validate_cmd = app.add_subcommand("validate", "parse and check a scenario");
    std::string validate_path;
    validate_cmd->add_option("scenario", validate_path, "scenario file")->required();

    // --- sweep -------------------------------------------------------------
    auto* sweep_cmd =
        app.add_subcommand("sweep", "run the cross product of parameter overrides");
    std::string sweep_path;
    std::string sweep_out = "dip-sweep";
    std::vector<std::string> set_specs;
    std::optional<std::uint64_t> sweep_seed;
    sweep_cmd->add_option("scenario", sweep_path, "scenario file")->required();
    sweep_cmd->add_option("--out", sweep_out, "sweep output directory");
    sweep_cmd->add_option("--set", set_specs,
                          "axis as section.name.key=v1,v2,... (repeatable)")
        ->required();
    sweep_cmd->add_option("--seed", sweep_seed, "seed override");

    // --- demo-mule ---------------------------------------------------------
    auto* demo_cmd =
        app.add_subcommand("demo-mule", "emit the built-in data-mule scenario");
    double contact_s = 60.0, gap_s = 240.0, prop_s = 0.001, rate_pps = 1.0;
    double demo_duration_s = 7200.0;
    std::optional<double> flow_end_s;
    std::uint64_t bandwidth = 125000;
    std::uint64_t demo_seed = 1;
    unsigned packet_size = 100;
    unsigned service_class = 0;
    std::string longevity = "days";
    std::string demo_out;
    demo_cmd->add_option("--contact-s", contact_s, "contact duration (seconds)");
    demo_cmd->add_option("--gap-s", gap_s, "gap between contacts (seconds)");
    demo_cmd->add_option("--bandwidth-bytes-per-s", bandwidth, "link bandwidth");
    demo_cmd->add_option("--propagation-delay-s", prop_s, "link propagation delay");
    demo_cmd->add_option("--rate-pps", rate_pps, "flow rate (packets per second)");
    demo_cmd->add_option("--packet-size-bytes", packet_size, "flow packet size");
    demo_cmd->add_option("--service-class", service_class, "flow service class 0..7");
    demo_cmd->add_option("--longevity", longevity, "seconds|minutes|hours|days");
    demo_cmd->add_option("--duration-s", demo_duration_s, "scenario duration");
    demo_cmd->add_option("--flow-end-s", flow_end_s,
                         "flow end (default: duration minus one mule period)");
    demo_cmd->add_option("--seed", demo_seed, "scenario seed");
    demo_cmd->add_option("--out", demo_out, "output file (default: stdout)");

    std::vector<const char*> argv;
    argv.push_back("dip");
    for (const std::string& a : args)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*validate_cmd) {
            load_scenario_file(validate_path);
            std::cout << "ok: " << validate_path << "\n";
            return 0;
        }

        if (*run_cmd) {
            RawScenario raw = parse_scenario_file(scenario_path);
            if (seed)
                apply_override(raw, "scenario.seed", std::to_string(*seed));
            if (duration_s)
                apply_override(raw, "scenario.duration_s", format_seconds_arg(*duration_s));
            if (!mode.empty())
                apply_override(raw, "scenario.mode", mode);
            Scenario sc = compile_scenario(raw);
            sc.collect_events = events;
            MetricsReport rep = run(sc);
            write_report_files(rep, out_dir, events);
            std::cout << summary_text(rep);
            std::cout << "report written to " << out_dir << "\n";
            return 0;
        }

        if (*sweep_cmd) {
            RawScenario base = parse_scenario_file(sweep_path);
            if (sweep_seed)
                apply_override(base, "scenario.seed", std::to_string(*sweep_seed));
            std::vector<SweepAxis> axes;
            for (const std::string& spec : set_specs)
                axes.push_back(parse_set(spec));

            std::size_t points = 1;
            for (const SweepAxis& a : axes)
                points *= a.values.size();

            std::ostringstream summary;
            summary << "point,overrides," << "flow,src,dst,emitted_unique,emitted_copies,"
                    << "delivered_unique,delivered_copies,delivery_ratio,latency_min_us,"
                    << "latency_mean_us,latency_max_us,latency_p95_us\n";

            std::vector<std::size_t> idx(axes.size(), 0);
            for (std::size_t point = 0; point < points; ++point) {
                RawScenario raw = base;
                std::string overrides;
                for (std::size_t a = 0; a < axes.size(); ++a) {
                    const std::string& value = axes[a].values[idx[a]];
                    apply_override(raw, axes[a].path, value);
                    if (!overrides.empty())
                        overrides += ';';
                    overrides += axes[a].path + "=" + value;
                }
                Scenario sc = compile_scenario(raw);
                MetricsReport rep = run(sc);
                char pname[32];
                std::snprintf(pname, sizeof(pname), "point_%03zu", point);
                write_report_files(rep, sweep_out + "/" + pname, false);

                // Summary rows repeat the per-point flows.csv rows verbatim.
                auto rows = read_csv(flows_csv(rep));
                for (std::size_t ri = 1; ri < rows.size(); ++ri) {
                    summary << pname << ',' << overrides;
                    for (const std::string& field : rows[ri])
                        summary << ',' << field;
                    summary << '\n';
                }

                for (std::size_t a = axes.size(); a-- > 0;) {
                    if (++idx[a] < axes[a].values.size())
                        break;
                    idx[a] = 0;
                }
            }
            std::filesystem::create_directories(sweep_out);
            std::ofstream out(sweep_out + "/sweep_summary.csv", std::ios::binary);
            out << summary.str();
            std::cout << "swept " << points << " points into " << sweep_out << "\n";
            return 0;
        }

        if (*demo_cmd) {
            MuleParams p;
            p.contact = static_cast<SimTime>(std::llround(contact_s * 1e6));
            p.gap = static_cast<SimTime>(std::llround(gap_s * 1e6));
            p.bandwidth_bytes_per_s = bandwidth;
            p.propagation_delay = static_cast<SimTime>(std::llround(prop_s * 1e6));
            p.flow_rate_pps = rate_pps;
            p.packet_size_bytes = static_cast<std::uint16_t>(packet_size);
            p.service_class = static_cast<std::uint8_t>(service_class);
            auto lg = longevity_from_name(longevity);
            if (!lg)
                throw ScenarioError("demo-mule: longevity",
                                    "expected seconds/minutes/hours/days");
            p.longevity = *lg;
            p.duration = static_cast<SimTime>(std::llround(demo_duration_s * 1e6));
            if (flow_end_s)
                p.flow_end = static_cast<SimTime>(std::llround(*flow_end_s * 1e6));
            p.seed = demo_seed;

            Scenario sc = build_data_mule(p);
            validate_scenario(sc);
            std::string text = format_scenario(sc);
            if (demo_out.empty()) {
                std::cout << text;
            } else {
                std::ofstream out(demo_out, std::ios::binary);
                if (!out)
                    throw std::runtime_error("cannot write " + demo_out);
                out << text;
            }
            return 0;
        }
    } catch (const ScenarioError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

} // namespace dip
