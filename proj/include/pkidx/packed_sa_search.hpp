#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "pkidx/packed_text.hpp"
#include "pkidx/suffix_structures.hpp"

namespace pkidx {

struct SearchStats {
    uint64_t chunk_comparisons = 0;
    uint32_t iterations = 0;
};

struct SearchState {
    int64_t L, R;   // sa ranks bounding the interval
    int32_t l, r;   // matched pattern-prefix lengths against suffixes sa[L], sa[R]
};

struct SearchOutcome {
    std::optional<int64_t> pred_rank;  // largest rank with suffix < pattern
    int64_t lo = 0, hi = 0;            // suffixes having the pattern as a prefix
    SearchStats stats;
};

// How a fully matched pattern compares against a longer suffix. The first
// binary-search pass treats an exhausted pattern as smaller than the suffix
// (suffixes carry the terminator, patterns do not); the second pass treats
// the pattern as if a symbol above every code followed it, which turns the
// same search into the upper bound of the match range.
enum class ExhaustRule { PatternLow, PatternHigh };

namespace detail {

struct CmpResult {
    int64_t matched;  // common prefix length
    int ord;          // -1 suffix < pattern, +1 suffix > pattern
};

// Chunked comparison of pattern[from..m) against the suffix at text position
// s, both sides aligned at the same offset.
inline CmpResult compare_suffix_pattern(const PackedText& text, int64_t s,
                                        const PackedText& pat, int64_t from,
                                        ExhaustRule rule, SearchStats& stats) {
    const int64_t m = static_cast<int64_t>(pat.size());
    const uint32_t alpha = pat.alpha();
    int64_t k = from;
    for (;;) {
        int64_t prem = m - k;
        if (prem == 0) return {m, rule == ExhaustRule::PatternLow ? +1 : -1};
        uint32_t len = static_cast<uint32_t>(std::min<int64_t>(alpha, prem));
        Chunk pc = pat.extract_chunk(k, len);
        Chunk sc = text.extract_chunk(s + k, len);
        ++stats.chunk_comparisons;
        if (auto mm = first_mismatch(pc, sc)) {
            uint32_t p = *mm;
            return {k + p, sc.code(p) < pc.code(p) ? -1 : +1};
        }
        k += len;
    }
}

using DebugHook = std::function<void(const SearchState&)>;

// First rank in [lo0, hi0] whose suffix is >= the pattern under the exhaust
// rule (hi0 when all are smaller). Classic l/r-maintaining binary search with
// LCP queries resolved by the range-minimum structure.
inline int64_t lower_bound_rank(const SuffixArrayIndex& ix, const PackedText& text,
                                const PackedText& pat, int64_t lo0, int64_t hi0,
                                ExhaustRule rule, SearchStats& stats,
                                const DebugHook* dbg = nullptr) {
    if (pat.bits() != text.bits())
        throw std::invalid_argument("pattern packed over a different alphabet");
    if (lo0 >= hi0) return lo0;
    auto c0 = compare_suffix_pattern(text, ix.sa[lo0], pat, 0, rule, stats);
    if (c0.ord > 0) return lo0;
    if (hi0 - lo0 == 1) return hi0;
    auto c1 = compare_suffix_pattern(text, ix.sa[hi0 - 1], pat, 0, rule, stats);
    if (c1.ord < 0) return hi0;

    int64_t L = lo0, R = hi0 - 1;
    int32_t l = static_cast<int32_t>(c0.matched), r = static_cast<int32_t>(c1.matched);
    while (R - L > 1) {
        ++stats.iterations;
        if (dbg) (*dbg)({L, R, l, r});
        int64_t M = (L + R) / 2;
        if (l != r) {
            if (l > r) {
                int32_t h = ix.lcp_query(L, M);
                if (h > l) {
                    L = M;
                    continue;
                }
                if (h < l) {
                    R = M;
                    r = h;
                    continue;
                }
            } else {
                int32_t h = ix.lcp_query(M, R);
                if (h > r) {
                    R = M;
                    continue;
                }
                if (h < r) {
                    L = M;
                    l = h;
                    continue;
                }
            }
        }
        auto c = compare_suffix_pattern(text, ix.sa[M], pat, std::max(l, r), rule, stats);
        if (c.ord < 0) {
            L = M;
            l = static_cast<int32_t>(c.matched);
        } else {
            R = M;
            r = static_cast<int32_t>(c.matched);
        }
    }
    return R;
}

}  // namespace detail

// Rank of the lexicographically largest suffix in [lo0, hi0) smaller than
// the pattern, or nullopt when every suffix in the range is >= the pattern.
inline std::optional<int64_t> packed_predecessor_search(const SuffixArrayIndex& ix,
                                                        const PackedText& text,
                                                        const PackedText& pat,
                                                        int64_t lo0, int64_t hi0,
                                                        SearchStats* stats_out = nullptr,
                                                        const detail::DebugHook* dbg = nullptr) {
    if (pat.size() == 0) throw std::invalid_argument("packed search requires a nonempty pattern");
    SearchStats stats;
    int64_t lb = detail::lower_bound_rank(ix, text, pat, lo0, hi0, ExhaustRule::PatternLow,
                                          stats, dbg);
    if (stats_out) *stats_out = stats;
    if (lb == lo0) return std::nullopt;
    return lb - 1;
}

// Maximal subrange [lo, hi) of [lo0, hi0) whose suffixes have the pattern as
// a prefix, plus the predecessor rank; two predecessor-style passes.
inline SearchOutcome packed_range_search(const SuffixArrayIndex& ix, const PackedText& text,
                                         const PackedText& pat, int64_t lo0, int64_t hi0,
                                         const detail::DebugHook* dbg = nullptr) {
    if (pat.size() == 0) throw std::invalid_argument("packed search requires a nonempty pattern");
    SearchOutcome out;
    out.lo = detail::lower_bound_rank(ix, text, pat, lo0, hi0, ExhaustRule::PatternLow,
                                      out.stats, dbg);
    out.hi = detail::lower_bound_rank(ix, text, pat, out.lo, hi0, ExhaustRule::PatternHigh,
                                      out.stats, dbg);
    if (out.lo > lo0) out.pred_rank = out.lo - 1;
    return out;
}

}  // namespace pkidx
