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

#ifndef DIP_REPORT_HH
#define DIP_REPORT_HH

#include <string>
#include <vector>

#include "dip/sim.hpp"

namespace dip {

// CSV column sets are a stable interface; the golden tests pin them.
std::string nodes_csv(const MetricsReport& r);
std::string flows_csv(const MetricsReport& r);
std::string links_csv(const MetricsReport& r);
std::string occupancy_csv(const MetricsReport& r);

// One JSON object per packet disposition (requires Scenario::collect_events).
std::string events_jsonl(const MetricsReport& r);

// All CSV families concatenated; byte-identical across runs with equal seeds.
std::string serialize_report(const MetricsReport& r);

// Human-oriented run summary for stdout.
std::string summary_text(const MetricsReport& r);

// Writes nodes.csv, flows.csv, links.csv, occupancy.csv (and events.jsonl
// when with_events) into dir, creating it if needed.
void write_report_files(const MetricsReport& r, const std::string& dir,
                        bool with_events);

// Minimal CSV reader for report files: rows of unquoted comma-separated
// fields. Used to re-read emitted reports.
std::vector<std::vector<std::string>> read_csv(const std::string& text);

} // namespace dip

#endif
