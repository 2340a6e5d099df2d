#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "pkidx/packed_text.hpp"
#include "pkidx/suffix_structures.hpp"

namespace pkidx {

// Table mapping every pattern of length 1..max_len to the deepest explicit
// tree node whose string prefixes it. max_len is the largest m with
// sigma + sigma^2 + ... + sigma^m <= n, so the table never exceeds n entries.
struct ShortPatternTable {
    uint32_t max_len = 0;            // M_s; 0 means the table is empty
    uint32_t sigma = 0;
    std::vector<uint64_t> offsets;   // offsets[len] = start of the length-len block
    std::vector<int32_t> entries;    // node ids, one per short pattern

    bool covers(size_t len) const { return len >= 1 && len <= max_len; }
};

// Bijection from short patterns onto 0..entries.size()-1: block offset of the
// pattern's length plus its base-sigma digit value.
inline uint64_t pattern_index(const ShortPatternTable& tab, std::span<const uint32_t> p) {
    if (!tab.covers(p.size()))
        throw std::invalid_argument("pattern_index: length outside table range");
    uint64_t d = 0;
    for (uint32_t c : p) d = d * tab.sigma + (c - 1);
    return tab.offsets[p.size()] + d;
}

inline int32_t lookup_dp(const ShortPatternTable& tab, std::span<const uint32_t> p) {
    return tab.entries[pattern_index(tab, p)];
}

// Depth-bounded co-traversal of the complete pattern trie and the suffix
// tree. While the pattern prefix stays on a tree path we record the deepest
// explicit node landed on; once it falls off the tree every extension shares
// that node, which fills a contiguous index range per length.
inline ShortPatternTable build_short_table(const SuffixTree& st, const PackedText& text,
                                           uint32_t sigma, uint64_t n) {
    ShortPatternTable tab;
    tab.sigma = sigma;

    uint64_t total = 0, pw = 1;
    uint32_t m = 0;
    for (;;) {
        uint64_t next = pw * sigma;
        if (total + next > n) break;
        total += next;
        pw = next;
        ++m;
    }
    tab.max_len = m;
    tab.offsets.assign(m + 1, 0);
    {
        uint64_t off = 0, powl = sigma;
        for (uint32_t len = 1; len <= m; ++len) {
            tab.offsets[len] = off;
            off += powl;
            powl *= sigma;
        }
    }
    tab.entries.assign(total, -1);
    if (m == 0) return tab;

    std::vector<uint64_t> pow(m, 1);
    for (uint32_t e = 1; e < m; ++e) pow[e] = pow[e - 1] * sigma;

    auto fill_subtree = [&](uint64_t dval, uint32_t len0, int32_t dp) {
        for (uint32_t len = len0; len <= m; ++len) {
            uint64_t span = pow[len - len0];
            uint64_t base = tab.offsets[len] + dval * span;
            std::fill(tab.entries.begin() + base, tab.entries.begin() + base + span, dp);
        }
    };

    auto edge_len = [&](int32_t v) {
        return st.nodes[v].edge_end - st.nodes[v].edge_start;
    };

    // (node, k): k characters consumed on the edge into node; k == edge
    // length means positioned exactly at the node.
    struct Frame {
        uint64_t dval;
        int32_t node;
        int32_t k;
        int32_t dp;
        uint32_t len;
        uint32_t next_code;
    };
    std::vector<Frame> stk;
    stk.push_back({0, st.root(), 0, st.root(), 0, 1});
    while (!stk.empty()) {
        Frame& f = stk.back();
        if (f.next_code > sigma) {
            stk.pop_back();
            continue;
        }
        uint32_t c = f.next_code++;
        uint64_t dval = f.dval * sigma + (c - 1);
        uint32_t len = f.len + 1;
        int32_t dp = f.dp;

        int32_t node = f.node, k = f.k;
        bool alive;
        if (k == edge_len(node)) {
            auto res = child_by_code(st, node, c);
            alive = res.kind == ChildLookup::Exact;
            if (alive) {
                node = res.child;
                k = 1;
            }
        } else {
            alive = text.char_at(st.nodes[node].edge_start + k) == c;
            if (alive) ++k;
        }
        if (alive && k == edge_len(node)) dp = node;

        if (!alive) {
            fill_subtree(dval, len, dp);
            continue;
        }
        tab.entries[tab.offsets[len] + dval] = dp;
        if (len < m) stk.push_back({dval, node, k, dp, len, 1});
    }
    return tab;
}

}  // namespace pkidx
