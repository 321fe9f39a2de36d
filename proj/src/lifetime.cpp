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

#include "dip/lifetime.hpp"

#include <algorithm>
#include <cassert>

namespace dip {

namespace {

// Ticks between shifts of each level: 1 tick, 60 ticks (10 min at the default
// granularity), 1440 ticks (4 h), 8640 ticks (1 day).
constexpr std::uint64_t kCadence[4] = {1, 60, 1440, 8640};

constexpr std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) {
    return (a + b - 1) / b;
}

} // namespace

LifetimeWheel::LifetimeWheel(SimTime tick_granularity) : granularity_(tick_granularity) {
    assert(granularity_ > 0);
}

SimTime LifetimeWheel::category_span(Longevity cat) {
    switch (cat) {
    case Longevity::Seconds: return seconds(60);
    case Longevity::Minutes: return seconds(3600);
    case Longevity::Hours: return seconds(86400);
    case Longevity::Days: return seconds(6 * 86400);
    }
    return 0;
}

SimTime LifetimeWheel::level_width(int level) const {
    return granularity_ * static_cast<SimTime>(kCadence[level]);
}

void LifetimeWheel::place(HandleId id, Entry& e, int level, std::uint64_t bucket) {
    e.level = level;
    e.bucket = bucket;
    levels_[level][bucket].push_back(id);
}

void LifetimeWheel::unlink(const Entry& e, HandleId id) {
    auto it = levels_[e.level].find(e.bucket);
    if (it == levels_[e.level].end())
        return;
    auto& vec = it->second;
    vec.erase(std::find(vec.begin(), vec.end(), id));
    if (vec.empty())
        levels_[e.level].erase(it);
}

std::optional<int> LifetimeWheel::insert(HandleId id, Longevity cat, SimTime now) {
    if (entries_.count(id))
        return std::nullopt;

    Entry e;
    e.deadline = now + category_span(cat);
    e.category = cat;
    int level = static_cast<int>(cat);
    SimTime width = level_width(level);
    std::uint64_t bucket = ceil_div(static_cast<std::uint64_t>(e.deadline),
                                    static_cast<std::uint64_t>(width));
    place(id, e, level, bucket);
    entries_.emplace(id, e);
    ++inserted_;

    // Logical label 0..23; mid-period insertions still report the top bin of
    // their category.
    int base = level * 6;
    std::int64_t rel = static_cast<std::int64_t>(bucket) - 1 - now / width;
    rel = std::clamp<std::int64_t>(rel, 0, 5);
    return base + static_cast<int>(rel);
}

void LifetimeWheel::reslot(HandleId id, SimTime now, int from_level,
                           std::vector<HandleId>& expired) {
    Entry& e = entries_.at(id);
    if (e.deadline <= now) {
        entries_.erase(id);
        ++expired_;
        expired.push_back(id);
        return;
    }
    SimTime g = granularity_;
    std::uint64_t sec_bucket = ceil_div(static_cast<std::uint64_t>(e.deadline),
                                        static_cast<std::uint64_t>(g));
    std::uint64_t sec_top = static_cast<std::uint64_t>(now / g) + 6;
    if (sec_bucket <= sec_top) {
        place(id, e, 0, sec_bucket);
    } else if (from_level >= 2) {
        int target = from_level - 1;
        SimTime width = level_width(target);
        place(id, e, target,
              ceil_div(static_cast<std::uint64_t>(e.deadline),
                       static_cast<std::uint64_t>(width)));
    } else {
        // Deadline is beyond the seconds span but the handle has already left
        // the minutes level; it rides the top seconds bin until it fits.
        place(id, e, 0, sec_top);
    }
}

std::vector<HandleId> LifetimeWheel::tick(SimTime now) {
    ++tick_count_;
    assert(now == static_cast<SimTime>(tick_count_) * granularity_);

    std::vector<HandleId> expired;
    // Coarse levels cascade before the bottom level flushes, so a handle can
    // fall through several levels within one tick.
    for (int level = 3; level >= 1; --level) {
        if (tick_count_ % kCadence[level] != 0)
            continue;
        std::uint64_t due = tick_count_ / kCadence[level] + 1;
        auto& buckets = levels_[level];
        while (!buckets.empty() && buckets.begin()->first <= due) {
            std::vector<HandleId> ids = std::move(buckets.begin()->second);
            buckets.erase(buckets.begin());
            for (HandleId id : ids)
                reslot(id, now, level, expired);
        }
    }

    auto& bottom = levels_[0];
    while (!bottom.empty() && bottom.begin()->first <= tick_count_) {
        std::vector<HandleId> ids = std::move(bottom.begin()->second);
        bottom.erase(bottom.begin());
        for (HandleId id : ids)
            reslot(id, now, 0, expired);
    }
    return expired;
}

std::optional<Longevity> LifetimeWheel::current_category(HandleId id, SimTime now) const {
    auto it = entries_.find(id);
    if (it == entries_.end())
        return std::nullopt;
    SimTime remaining = it->second.deadline - now;
    if (remaining <= category_span(Longevity::Seconds))
        return Longevity::Seconds;
    if (remaining <= category_span(Longevity::Minutes))
        return Longevity::Minutes;
    if (remaining <= category_span(Longevity::Hours))
        return Longevity::Hours;
    return Longevity::Days;
}

bool LifetimeWheel::remove(HandleId id) {
    auto it = entries_.find(id);
    if (it == entries_.end())
        return false;
    unlink(it->second, id);
    entries_.erase(it);
    ++removed_;
    return true;
}

std::optional<SimTime> LifetimeWheel::deadline(HandleId id) const {
    auto it = entries_.find(id);
    if (it == entries_.end())
        return std::nullopt;
    return it->second.deadline;
}

} // namespace dip
