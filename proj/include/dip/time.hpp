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

#ifndef DIP_TIME_HH
#define DIP_TIME_HH

#include <cstdint>

namespace dip {

// Simulated time in integer microseconds. All timing arithmetic is integral
// so that runs are reproducible bit-for-bit.
using SimTime = std::int64_t;

constexpr SimTime kUsecPerSec = 1'000'000;

constexpr SimTime seconds(std::int64_t s) { return s * kUsecPerSec; }
constexpr SimTime milliseconds(std::int64_t ms) { return ms * 1'000; }

constexpr double to_seconds(SimTime t) {
    return static_cast<double>(t) / static_cast<double>(kUsecPerSec);
}

} // namespace dip

#endif
