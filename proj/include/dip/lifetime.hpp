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

#ifndef DIP_LIFETIME_HH
#define DIP_LIFETIME_HH

#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "dip/packet.hpp"
#include "dip/time.hpp"

namespace dip {

using HandleId = std::uint64_t;

// Hierarchical timer wheel tracking at-rest packet lifetime in 24 logical
// bins: four category levels of six bins each. The bottom level shifts every
// tick; the minutes/hours/days levels shift every 60th/1440th/8640th tick,
// cascading their lowest bin downward. Bins are stored sparsely keyed by
// absolute flush index, so a handle inserted mid-period is never expired
// early: a bin flush re-slots handles whose deadline is still in the future,
// and a handle therefore expires on exactly the first tick at or after its
// deadline.
class LifetimeWheel {
  public:
    explicit LifetimeWheel(SimTime tick_granularity = seconds(10));

    // Top-of-category residence time, fixed: 60 s / 1 h / 24 h / 6 d.
    static SimTime category_span(Longevity cat);

    // Places the handle in the top bin of its category and returns the bin
    // label (Seconds->5, Minutes->11, Hours->17, Days->23). nullopt if the
    // handle is already live.
    std::optional<int> insert(HandleId id, Longevity cat, SimTime now);

    // Advances one tick; `now` must be the tick's absolute time. Returns the
    // handles expired by this tick, deterministically ordered.
    std::vector<HandleId> tick(SimTime now);

    // Category matching the remaining lifetime; this is what gets written
    // back into the DSCP longevity bits on dequeue.
    std::optional<Longevity> current_category(HandleId id, SimTime now) const;

    bool remove(HandleId id);
    bool contains(HandleId id) const { return entries_.count(id) != 0; }
    std::optional<SimTime> deadline(HandleId id) const;

    std::size_t live() const { return entries_.size(); }
    std::uint64_t inserted_total() const { return inserted_; }
    std::uint64_t expired_total() const { return expired_; }
    std::uint64_t removed_total() const { return removed_; }
    std::uint64_t ticks_elapsed() const { return tick_count_; }
    SimTime tick_granularity() const { return granularity_; }

  private:
    struct Entry {
        SimTime deadline;
        Longevity category;
        int level;
        std::uint64_t bucket;
    };

    // bucket index b at level L is flushed/cascaded when the tick clock
    // reaches b*width (level 0) or (b-1)*width (levels 1..3).
    SimTime level_width(int level) const;
    void place(HandleId id, Entry& e, int level, std::uint64_t bucket);
    void unlink(const Entry& e, HandleId id);
    void reslot(HandleId id, SimTime now, int from_level, std::vector<HandleId>& expired);

    SimTime granularity_;
    std::uint64_t tick_count_ = 0;
    std::unordered_map<HandleId, Entry> entries_;
    std::map<std::uint64_t, std::vector<HandleId>> levels_[4];

    std::uint64_t inserted_ = 0;
    std::uint64_t expired_ = 0;
    std::uint64_t removed_ = 0;
};

} // namespace dip

#endif
