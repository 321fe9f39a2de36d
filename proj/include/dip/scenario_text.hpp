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

#ifndef DIP_SCENARIO_TEXT_HH
#define DIP_SCENARIO_TEXT_HH

#include <string>
#include <vector>

#include "dip/sim.hpp"

namespace dip {

// Line-oriented sectioned key-value scenario files:
//
//   [scenario]
//   duration_s = 7200
//   [node houseA]
//   addr = 10.0.0.1
//   ...
//
// Sections: scenario, defaults, node, link, route, flow. Keys carry explicit
// units (_s, _bytes, _pps). `#` starts a comment. Keys may repeat where that
// makes sense (up_interval).
struct RawEntry {
    std::string key;
    std::string value;
    int line = 0;
};

struct RawSection {
    std::string kind;
    std::string name;
    std::vector<RawEntry> entries;
    int line = 0;
};

struct RawScenario {
    std::vector<RawSection> sections;
};

// Syntax only; throws ScenarioError with a line diagnostic.
RawScenario parse_scenario_text(const std::string& text);

// Semantic pass: resolves names, applies [defaults], rejects unknown keys,
// and runs full validation.
Scenario compile_scenario(const RawScenario& raw);

// Canonical emission; output re-parses to an equivalent scenario.
std::string format_scenario(const Scenario& s);

RawScenario parse_scenario_file(const std::string& path);
Scenario load_scenario_file(const std::string& path);

// Sweep/CLI override: path is "scenario.<key>", "defaults.<key>", or
// "<kind>.<name>.<key>". Replaces existing entries for the key (or appends),
// creating the section if needed for scenario/defaults.
void apply_override(RawScenario& raw, const std::string& path, const std::string& value);

} // namespace dip

#endif
