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

#ifndef DIP_ADDR_HH
#define DIP_ADDR_HH

#include <cstdint>
#include <optional>
#include <string>

namespace dip {

// IPv4 addresses are kept in host byte order; serialization code is the only
// place that cares about wire order.
using Ipv4Addr = std::uint32_t;

std::string format_ipv4(Ipv4Addr addr);
std::optional<Ipv4Addr> parse_ipv4(const std::string& text);

constexpr Ipv4Addr prefix_mask(int len) {
    return len <= 0 ? 0u : (len >= 32 ? 0xffffffffu : ~0u << (32 - len));
}

// A canonical address/length pair: bits past the length are always zero.
struct Prefix {
    Ipv4Addr addr = 0;
    std::uint8_t len = 0;

    static Prefix make(Ipv4Addr addr, int len) {
        Prefix p;
        p.len = static_cast<std::uint8_t>(len);
        p.addr = addr & prefix_mask(len);
        return p;
    }

    static Prefix host(Ipv4Addr addr) { return make(addr, 32); }

    bool covers(Ipv4Addr a) const { return (a & prefix_mask(len)) == addr; }
    bool covers(const Prefix& other) const {
        return other.len >= len && covers(other.addr);
    }

    bool operator==(const Prefix& o) const { return addr == o.addr && len == o.len; }
    bool operator<(const Prefix& o) const {
        return addr != o.addr ? addr < o.addr : len < o.len;
    }

    std::string str() const;
};

std::optional<Prefix> parse_prefix(const std::string& text);

} // namespace dip

#endif
