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

#include "dip/store.hpp"

#include <algorithm>
#include <cassert>

namespace dip {

RedDecision red_admit(RedState& state, const RedParams& params,
                      std::size_t queue_len, Rng& rng) {
    state.avg = (1.0 - params.ewma_weight) * state.avg +
                params.ewma_weight * static_cast<double>(queue_len);
    if (state.avg < params.min_th)
        return RedDecision::Admit;
    if (state.avg >= params.max_th)
        return RedDecision::Drop;
    double p = params.max_p * (state.avg - params.min_th) /
               (params.max_th - params.min_th);
    return rng.next_double() < p ? RedDecision::Drop : RedDecision::Admit;
}

DisruptionStore::DisruptionStore(StoreConfig cfg, CountingBloomFilter& filter,
                                 LifetimeWheel& wheel)
    : cfg_(std::move(cfg)), filter_(filter), wheel_(wheel) {
    assert(cfg_.bucket_count >= 1);
}

std::size_t DisruptionStore::bucket_for(Ipv4Addr dst) const {
    return static_cast<std::size_t>(mix64(dst ^ cfg_.dst_hash_salt) %
                                    static_cast<std::uint64_t>(cfg_.bucket_count));
}

Packet DisruptionStore::remove_parked(const Location& loc, bool unregister_wheel) {
    Parked parked = std::move(*loc.it);
    Bucket& bucket = loc.group->buckets[loc.bucket];
    bucket.bytes -= parked.packet.total_length;
    bytes_used_ -= parked.packet.total_length;
    bucket.fifo.erase(loc.it);
    handle_index_.erase(parked.handle);
    filter_.remove(parked.digest);
    if (unregister_wheel)
        wheel_.remove(parked.handle);
    return std::move(parked.packet);
}

DisruptionStore::ParkResult DisruptionStore::park(const Packet& packet,
                                                  const Prefix& parking_key,
                                                  SimTime now, Rng& rng) {
    ParkResult result;
    auto marking = decode_dscp(packet.dscp);
    assert(marking && "only DIP-marked packets may be parked");

    Digest digest = packet_digest(packet, cfg_.digest_key);
    if (filter_.contains(digest)) {
        result.status = ParkResult::Status::DroppedDuplicate;
        return result;
    }

    QueueGroup& group = trie_.find_or_insert(parking_key);
    if (group.buckets.empty())
        group.buckets.resize(static_cast<std::size_t>(cfg_.bucket_count));
    std::size_t bidx = bucket_for(packet.dst);
    Bucket& bucket = group.buckets[bidx];

    const std::uint64_t size = packet.total_length;
    auto over_limit = [&] {
        return bucket.fifo.size() + 1 > cfg_.bucket_packet_limit ||
               bucket.bytes + size > cfg_.bucket_byte_limit ||
               bytes_used_ + size > cfg_.byte_capacity;
    };

    switch (cfg_.policy) {
    case DropPolicyKind::TailDrop:
        if (over_limit()) {
            result.status = ParkResult::Status::DroppedFull;
            return result;
        }
        break;
    case DropPolicyKind::HeadDrop: {
        // Feasibility first, so a hopeless arrival does not empty the queue.
        // Evicting this bucket frees at most bucket.bytes.
        if (size > cfg_.bucket_byte_limit || cfg_.bucket_packet_limit < 1 ||
            bytes_used_ - bucket.bytes + size > cfg_.byte_capacity) {
            result.status = ParkResult::Status::DroppedFull;
            return result;
        }
        while (over_limit() && !bucket.fifo.empty()) {
            Location loc{&group, bidx, bucket.fifo.begin()};
            result.evicted.push_back(remove_parked(loc, /*unregister_wheel=*/true));
        }
        if (over_limit()) {
            // Bucket drained but the shared byte budget is still exhausted.
            result.status = ParkResult::Status::DroppedFull;
            return result;
        }
        break;
    }
    case DropPolicyKind::Red:
        if (over_limit()) {
            result.status = ParkResult::Status::DroppedFull;
            return result;
        }
        if (red_admit(bucket.red, cfg_.red, bucket.fifo.size(), rng) ==
            RedDecision::Drop) {
            result.status = ParkResult::Status::DroppedFull;
            return result;
        }
        break;
    }

    HandleId handle = next_handle_++;
    auto label = wheel_.insert(handle, marking->longevity, now);
    assert(label && "handle ids are unique");
    filter_.insert(digest);
    bucket.fifo.push_back(Parked{packet, handle, digest, next_seq_++});
    bucket.bytes += size;
    bytes_used_ += size;
    handle_index_[handle] = Location{&group, bidx, std::prev(bucket.fifo.end())};

    result.status = ParkResult::Status::Parked;
    result.handle = handle;
    result.bin_label = label.value_or(-1);
    return result;
}

std::vector<Packet> DisruptionStore::drain(const Prefix& prefix,
                                           std::size_t max_packets,
                                           std::uint64_t max_bytes, SimTime now) {
    struct FragKey {
        Ipv4Addr src;
        Ipv4Addr dst;
        std::uint16_t ip_id;
        std::uint8_t protocol;
        bool operator==(const FragKey&) const = default;
    };
    struct Candidate {
        HandleId handle;
        std::uint64_t seq;
        int service_class;
        bool fragment;
        FragKey frag_key;
        bool taken = false;
    };
    std::vector<Candidate> cands;
    trie_.for_each_covered(prefix, [&](const Prefix&, QueueGroup& group) {
        for (std::size_t b = 0; b < group.buckets.size(); ++b) {
            for (const Parked& parked : group.buckets[b].fifo) {
                auto marking = decode_dscp(parked.packet.dscp);
                Candidate c;
                c.handle = parked.handle;
                c.seq = parked.seq;
                c.service_class = marking ? marking->service_class : 0;
                c.fragment = parked.packet.is_fragment();
                c.frag_key = FragKey{parked.packet.src, parked.packet.dst,
                                     parked.packet.ip_id, parked.packet.protocol};
                cands.push_back(c);
            }
        }
    });
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        if (a.service_class != b.service_class)
            return a.service_class > b.service_class;
        return a.seq < b.seq;
    });

    std::vector<Packet> out;
    std::uint64_t out_bytes = 0;

    auto emit = [&](Candidate& c) -> bool {
        auto locit = handle_index_.find(c.handle);
        assert(locit != handle_index_.end());
        const Packet& peek = locit->second.it->packet;
        if (out.size() + 1 > max_packets)
            return false;
        if (out_bytes + peek.total_length > max_bytes)
            return false;
        auto category = wheel_.current_category(c.handle, now);
        Packet pkt = remove_parked(locit->second, /*unregister_wheel=*/true);
        auto marking = decode_dscp(pkt.dscp);
        if (marking && category) {
            marking->longevity = *category;
            pkt.dscp = encode_dscp(*marking);
        }
        out_bytes += pkt.total_length;
        out.push_back(std::move(pkt));
        c.taken = true;
        return true;
    };

    for (std::size_t i = 0; i < cands.size(); ++i) {
        if (cands[i].taken)
            continue;
        if (!emit(cands[i]))
            return out;
        if (cands[i].fragment) {
            // Keep the datagram's other fragments adjacent regardless of
            // class, in arrival order.
            std::vector<Candidate*> group;
            for (auto& other : cands)
                if (!other.taken && other.fragment && other.frag_key == cands[i].frag_key)
                    group.push_back(&other);
            std::sort(group.begin(), group.end(),
                      [](const Candidate* a, const Candidate* b) { return a->seq < b->seq; });
            for (Candidate* other : group)
                if (!emit(*other))
                    return out;
        }
    }
    return out;
}

std::vector<Packet> DisruptionStore::expire(std::span<const HandleId> handles) {
    std::vector<Packet> out;
    for (HandleId id : handles) {
        auto it = handle_index_.find(id);
        if (it == handle_index_.end())
            continue; // already drained
        out.push_back(remove_parked(it->second, /*unregister_wheel=*/false));
    }
    return out;
}

bool DisruptionStore::empty_under(const Prefix& prefix) const {
    bool any = false;
    trie_.for_each_covered(prefix, [&](const Prefix&, const QueueGroup& group) {
        for (const Bucket& b : group.buckets)
            if (!b.fifo.empty())
                any = true;
    });
    return !any;
}

std::vector<Digest> DisruptionStore::parked_digests() const {
    std::vector<Digest> out;
    trie_.for_each_covered(Prefix::make(0, 0),
                           [&](const Prefix&, const QueueGroup& group) {
                               for (const Bucket& b : group.buckets)
                                   for (const Parked& p : b.fifo)
                                       out.push_back(p.digest);
                           });
    return out;
}

} // namespace dip
