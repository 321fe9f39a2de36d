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

#ifndef DIP_PREFIX_TRIE_HH
#define DIP_PREFIX_TRIE_HH

#include <memory>
#include <optional>
#include <utility>

#include "dip/addr.hpp"

namespace dip {

// Binary trie keyed by address prefixes, most significant bit first.
// Traversals visit prefixes in ascending (addr, len) order, which keeps every
// consumer deterministic.
template <typename T>
class PrefixTrie {
  public:
    T& find_or_insert(const Prefix& p, T initial = T{}) {
        Node* n = descend(p, /*create=*/true);
        if (!n->value) {
            n->value.emplace(std::move(initial));
            ++size_;
        }
        return *n->value;
    }

    T* find(const Prefix& p) {
        Node* n = descend(p, /*create=*/false);
        return n && n->value ? &*n->value : nullptr;
    }
    const T* find(const Prefix& p) const {
        return const_cast<PrefixTrie*>(this)->find(p);
    }

    // Visits every stored prefix that covers `addr`, shortest first.
    template <typename F>
    void for_each_match(Ipv4Addr addr, F&& fn) const {
        const Node* n = &root_;
        Prefix p = Prefix::make(0, 0);
        for (int depth = 0;; ++depth) {
            if (n->value)
                fn(p, *n->value);
            if (depth == 32)
                break;
            int bit = (addr >> (31 - depth)) & 1;
            n = n->child[bit].get();
            if (!n)
                break;
            p = Prefix::make(addr, depth + 1);
        }
    }

    // Visits every stored prefix covered by `p` (i.e. at or below it).
    template <typename F>
    void for_each_covered(const Prefix& p, F&& fn) {
        Node* n = descend(p, /*create=*/false);
        if (n)
            visit_subtree(n, p, fn);
    }
    template <typename F>
    void for_each_covered(const Prefix& p, F&& fn) const {
        const Node* n = const_cast<PrefixTrie*>(this)->descend(p, /*create=*/false);
        if (n)
            visit_subtree(const_cast<Node*>(n), p, fn);
    }

    template <typename F>
    void for_each(F&& fn) {
        for_each_covered(Prefix::make(0, 0), fn);
    }
    template <typename F>
    void for_each(F&& fn) const {
        for_each_covered(Prefix::make(0, 0), fn);
    }

    std::size_t size() const { return size_; }

  private:
    struct Node {
        std::unique_ptr<Node> child[2];
        std::optional<T> value;
    };

    Node* descend(const Prefix& p, bool create) {
        Node* n = &root_;
        for (int depth = 0; depth < p.len; ++depth) {
            int bit = (p.addr >> (31 - depth)) & 1;
            if (!n->child[bit]) {
                if (!create)
                    return nullptr;
                n->child[bit] = std::make_unique<Node>();
            }
            n = n->child[bit].get();
        }
        return n;
    }

    template <typename F>
    static void visit_subtree(Node* n, Prefix p, F& fn) {
        if (n->value)
            fn(p, *n->value);
        for (int bit = 0; bit < 2; ++bit) {
            if (n->child[bit]) {
                Prefix child = p;
                child.len = static_cast<std::uint8_t>(p.len + 1);
                if (bit)
                    child.addr |= 1u << (31 - p.len);
                visit_subtree(n->child[bit].get(), child, fn);
            }
        }
    }

    Node root_;
    std::size_t size_ = 0;
};

} // namespace dip

#endif
