#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pkidx/suffix_structures.hpp"

namespace pkidx::naive {

// Reference implementations used for differential testing and the CLI's
// --engine naive mode. They work directly on raw bytes and share no code or
// comparison routines with the indexed structures.
//
// Comparison convention (same one the index implements): every suffix ends
// with an implicit terminator that sorts below every byte; patterns have no
// terminator. A pattern that is a proper prefix of a suffix sorts before it,
// and a suffix that is a proper prefix of a pattern sorts before the pattern.

inline uint64_t naive_count(std::span<const uint8_t> text, std::span<const uint8_t> p) {
    if (p.size() > text.size()) return 0;
    if (p.empty()) return text.size();
    uint64_t c = 0;
    for (size_t i = 0; i + p.size() <= text.size(); ++i) {
        size_t j = 0;
        while (j < p.size() && text[i + j] == p[j]) ++j;
        if (j == p.size()) ++c;
    }
    return c;
}

inline std::vector<uint64_t> naive_locate(std::span<const uint8_t> text,
                                          std::span<const uint8_t> p) {
    std::vector<uint64_t> out;
    if (p.empty()) {
        for (size_t i = 0; i < text.size(); ++i) out.push_back(i);
        return out;
    }
    if (p.size() > text.size()) return out;
    for (size_t i = 0; i + p.size() <= text.size(); ++i) {
        size_t j = 0;
        while (j < p.size() && text[i + j] == p[j]) ++j;
        if (j == p.size()) out.push_back(i);
    }
    return out;
}

// true when the suffix starting at s is lexicographically smaller than p.
inline bool suffix_less_than_pattern(std::span<const uint8_t> text, size_t s,
                                     std::span<const uint8_t> p) {
    size_t n = text.size();
    size_t k = 0;
    while (s + k < n && k < p.size()) {
        if (text[s + k] != p[k]) return text[s + k] < p[k];
        ++k;
    }
    if (k == p.size()) return false;  // pattern exhausted: pattern <= suffix plus terminator
    return true;                      // suffix exhausted: terminator sorts lowest
}

// Start position of the lexicographically largest suffix strictly smaller
// than p, scanning all suffixes.
inline std::optional<uint64_t> naive_predecessor(std::span<const uint8_t> text,
                                                 std::span<const uint8_t> p) {
    std::optional<uint64_t> best;
    for (size_t s = 0; s < text.size(); ++s) {
        if (!suffix_less_than_pattern(text, s, p)) continue;
        if (!best) {
            best = s;
            continue;
        }
        // keep the larger of the two candidate suffixes
        size_t a = *best, b = s, n = text.size(), k = 0;
        bool b_larger = false;
        while (a + k < n && b + k < n && text[a + k] == text[b + k]) ++k;
        if (b + k == n) b_larger = false;       // b is a proper prefix of a
        else if (a + k == n) b_larger = true;   // a is a proper prefix of b
        else b_larger = text[b + k] > text[a + k];
        if (b_larger) best = s;
    }
    return best;
}

// Deepest explicit node whose represented string is a prefix of p, found by
// walking edges character by character from the root.
inline int32_t naive_deepest_prefix_node(const SuffixTree& st, const PackedText& text,
                                         std::span<const uint32_t> p) {
    int32_t deepest = st.root();
    int32_t cur = st.root();
    size_t pos = 0;
    while (pos < p.size()) {
        int32_t next = -1;
        for (auto& [code, ch] : st.nodes[cur].children)
            if (code == p[pos]) next = ch;
        if (next == -1) break;
        const auto& nd = st.nodes[next];
        int32_t elen = nd.edge_end - nd.edge_start;
        int32_t k = 0;
        while (k < elen && pos + k < p.size() &&
               text.char_at(nd.edge_start + k) == p[pos + k])
            ++k;
        if (k == elen) {  // landed on an explicit node
            pos += k;
            cur = next;
            deepest = next;
        } else {
            break;  // ended or diverged inside the edge
        }
    }
    return deepest;
}

}  // namespace pkidx::naive
