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

#ifndef DIP_STORE_HH
#define DIP_STORE_HH

#include <cstdint>
#include <list>
#include <span>
#include <unordered_map>
#include <vector>

#include "dip/dupfilter.hpp"
#include "dip/lifetime.hpp"
#include "dip/packet.hpp"
#include "dip/prefix_trie.hpp"
#include "dip/rng.hpp"

namespace dip {

enum class DropPolicyKind { TailDrop, HeadDrop, Red };

struct RedParams {
    double min_th = 5.0;       // packets
    double max_th = 15.0;      // packets
    double max_p = 0.02;       // drop probability at max_th
    double ewma_weight = 0.002;
};

struct RedState {
    double avg = 0.0;
};

enum class RedDecision { Admit, Drop };

// One EWMA update plus the drop decision: never below min_th, always at or
// above max_th, linear in between scaled by max_p.
RedDecision red_admit(RedState& state, const RedParams& params,
                      std::size_t queue_len, Rng& rng);

struct StoreConfig {
    std::uint64_t byte_capacity = 16 * 1024 * 1024;
    int bucket_count = 16; // B; 1 collapses to a single queue per prefix
    std::size_t bucket_packet_limit = 4096;
    std::uint64_t bucket_byte_limit = 16 * 1024 * 1024;
    DropPolicyKind policy = DropPolicyKind::TailDrop;
    RedParams red;
    std::uint64_t dst_hash_salt = 0;
    DigestKey digest_key;
};

// Parked packets indexed two ways: a prefix trie of queue groups for
// route-scope drains, and destination-hashed FIFO buckets within each group
// so one busy host cannot head-of-line block a whole subnet.
class DisruptionStore {
  public:
    DisruptionStore(StoreConfig cfg, CountingBloomFilter& filter, LifetimeWheel& wheel);

    struct ParkResult {
        enum class Status { Parked, DroppedDuplicate, DroppedFull };
        Status status = Status::Parked;
        HandleId handle = 0;
        int bin_label = -1;
        // Head-drop casualties, already unregistered from the filter and
        // wheel; returned so the caller can count them.
        std::vector<Packet> evicted;
    };

    // Packet must carry a DIP marking (caller classifies first).
    ParkResult park(const Packet& packet, const Prefix& parking_key, SimTime now,
                    Rng& rng);

    // Removes and returns packets under `prefix`, service class descending and
    // FIFO within a class, except that fragments of one datagram are emitted
    // back to back once the first of them is drained. Stops at either budget.
    // Drained packets leave the filter and the wheel, and their DSCP longevity
    // bits are rewritten to the current lifetime category.
    std::vector<Packet> drain(const Prefix& prefix, std::size_t max_packets,
                              std::uint64_t max_bytes, SimTime now);

    // Removes handles the wheel has already expired. Unknown handles are
    // ignored (they were drained first). Returns the dropped packets.
    std::vector<Packet> expire(std::span<const HandleId> handles);

    bool empty_under(const Prefix& prefix) const;
    std::uint64_t bytes_used() const { return bytes_used_; }
    std::size_t packets_live() const { return handle_index_.size(); }
    std::uint64_t byte_capacity() const { return cfg_.byte_capacity; }

    // Digest multiset of everything parked; test hook for the filter/store
    // consistency property.
    std::vector<Digest> parked_digests() const;

  private:
    struct Parked {
        Packet packet;
        HandleId handle;
        Digest digest;
        std::uint64_t seq;
    };
    struct Bucket {
        std::list<Parked> fifo;
        std::uint64_t bytes = 0;
        RedState red;
    };
    struct QueueGroup {
        std::vector<Bucket> buckets;
    };
    struct Location {
        QueueGroup* group;
        std::size_t bucket;
        std::list<Parked>::iterator it;
    };

    std::size_t bucket_for(Ipv4Addr dst) const;
    Packet remove_parked(const Location& loc, bool unregister_wheel);

    StoreConfig cfg_;
    CountingBloomFilter& filter_;
    LifetimeWheel& wheel_;
    PrefixTrie<QueueGroup> trie_;
    std::unordered_map<HandleId, Location> handle_index_;
    std::uint64_t bytes_used_ = 0;
    std::uint64_t next_handle_ = 1;
    std::uint64_t next_seq_ = 1;
};

} // namespace dip

#endif
