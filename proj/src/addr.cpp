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

#include "dip/addr.hpp"

#include <cstdio>

namespace dip {

std::string format_ipv4(Ipv4Addr addr) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%u.%u.%u.%u",
                  (addr >> 24) & 0xff, (addr >> 16) & 0xff,
                  (addr >> 8) & 0xff, addr & 0xff);
    return buf;
}

std::optional<Ipv4Addr> parse_ipv4(const std::string& text) {
    unsigned a, b, c, d;
    char trailing;
    int n = std::sscanf(text.c_str(), "%u.%u.%u.%u%c", &a, &b, &c, &d, &trailing);
    if (n != 4 || a > 255 || b > 255 || c > 255 || d > 255)
        return std::nullopt;
    return (a << 24) | (b << 16) | (c << 8) | d;
}

std::string Prefix::str() const {
    return format_ipv4(addr) + "/" + std::to_string(len);
}

std::optional<Prefix> parse_prefix(const std::string& text) {
    auto slash = text.find('/');
    if (slash == std::string::npos)
        return std::nullopt;
    auto addr = parse_ipv4(text.substr(0, slash));
    if (!addr)
        return std::nullopt;
    const std::string len_part = text.substr(slash + 1);
    if (len_part.empty() || len_part.size() > 2)
        return std::nullopt;
    int len = 0;
    for (char ch : len_part) {
        if (ch < '0' || ch > '9')
            return std::nullopt;
        len = len * 10 + (ch - '0');
    }
    if (len > 32)
        return std::nullopt;
    return Prefix::make(*addr, len);
}

} // namespace dip
