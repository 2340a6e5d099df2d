#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pkidx/heavy_index.hpp"
#include "pkidx/packed_sa_search.hpp"
#include "pkidx/packed_text.hpp"
#include "pkidx/short_table.hpp"
#include "pkidx/suffix_structures.hpp"

namespace pkidx {

struct BuildOptions {
    std::optional<uint32_t> force_threshold;  // overrides the (log2 log2 n)^2 cutoff
};

struct PackedIndex {
    Alphabet alphabet;
    PackedText text;
    SuffixArrayIndex sa;
    SuffixTree tree;
    HeavyIndex heavy;
    ShortPatternTable short_table;

    uint64_t n() const { return text.size(); }
};

// Promotions happen during the heavy decomposition, so the short table is
// built last and its entries see the final set of explicit nodes.
inline PackedIndex build_index(std::span<const uint8_t> raw, const BuildOptions& opts = {}) {
    PackedIndex idx;
    idx.alphabet = build_alphabet(raw);
    idx.text = PackedText::pack(raw, idx.alphabet);
    idx.sa = build_suffix_array(idx.text);
    idx.tree = build_suffix_tree(idx.sa, idx.text);
    uint32_t t = opts.force_threshold ? *opts.force_threshold : default_threshold(raw.size());
    if (t < 2) t = 2;
    auto hc = classify_heavy(idx.tree, t);
    idx.heavy = build_heavy_index(idx.tree, std::move(hc), idx.text, idx.sa);
    idx.short_table = build_short_table(idx.tree, idx.text, idx.alphabet.sigma, idx.n());
    return idx;
}

inline std::vector<uint8_t> decode_text(const PackedIndex& idx) {
    std::vector<uint8_t> out(idx.n());
    for (uint64_t i = 0; i < idx.n(); ++i)
        out[i] = idx.alphabet.byte_of[idx.text.char_at(i) - 1];
    return out;
}

enum class QueryMode { Count, Locate, Predecessor };

struct QueryTrace {
    bool short_path = false;
    bool long_path = false;
    bool light_route = false;
    bool sa_fallback = false;       // no heavy structure, whole-range search
    bool out_of_alphabet = false;
    bool reached_heavy_stage = false;
    uint32_t micro_steps = 0;
    uint64_t chars_matched = 0;     // descent progress at the stop micro tree
    uint32_t light_pred_queries = 0;
    uint32_t heavy_pred_queries = 0;
    int32_t dp_node = -1;
    SearchStats sa_stats;
};

struct QueryOptions {
    QueryMode mode = QueryMode::Count;
    bool force_long = false;  // test hook: route short patterns down the long path
    QueryTrace* trace = nullptr;
};

struct Answer {
    uint64_t count = 0;
    std::vector<uint64_t> locations;    // locate only, in sa order
    std::optional<int64_t> pred_rank;   // sa rank of the predecessor suffix
    std::optional<uint64_t> pred_pos;   // its text position
};

namespace detail {

inline void finish_pred(const PackedIndex& idx, Answer& ans) {
    if (ans.pred_rank) ans.pred_pos = static_cast<uint64_t>(idx.sa.sa[*ans.pred_rank]);
}

// Answer for a match range [lo, hi) whose lower bound is a global rank:
// every suffix below lo is smaller than the pattern.
inline Answer range_answer(const PackedIndex& idx, int64_t lo, int64_t hi, QueryMode mode) {
    Answer ans;
    ans.count = static_cast<uint64_t>(hi - lo);
    if (mode == QueryMode::Locate)
        for (int64_t k = lo; k < hi; ++k)
            ans.locations.push_back(static_cast<uint64_t>(idx.sa.sa[k]));
    if (lo > 0) ans.pred_rank = lo - 1;
    finish_pred(idx, ans);
    return ans;
}

// Packed search restricted to [lo0, hi0); all suffixes below lo0 are known
// to be smaller than the pattern and all above hi0 greater.
inline Answer searched_answer(const PackedIndex& idx, const PackedText& pat, int64_t lo0,
                              int64_t hi0, QueryMode mode, QueryTrace* trace) {
    Answer ans;
    if (mode == QueryMode::Predecessor) {
        SearchStats stats;
        auto pred = packed_predecessor_search(idx.sa, idx.text, pat, lo0, hi0, &stats);
        if (trace) trace->sa_stats = stats;
        if (pred) ans.pred_rank = *pred;
        else if (lo0 > 0) ans.pred_rank = lo0 - 1;
        finish_pred(idx, ans);
        return ans;
    }
    auto out = packed_range_search(idx.sa, idx.text, pat, lo0, hi0);
    if (trace) trace->sa_stats = out.stats;
    ans.count = static_cast<uint64_t>(out.hi - out.lo);
    if (mode == QueryMode::Locate)
        for (int64_t k = out.lo; k < out.hi; ++k)
            ans.locations.push_back(static_cast<uint64_t>(idx.sa.sa[k]));
    if (out.lo > 0) ans.pred_rank = out.lo - 1;
    finish_pred(idx, ans);
    return ans;
}

// Compare pattern codes [from, to) against the text at suffix position s.
// Returns the first mismatching offset, or `to` when everything matches.
inline int64_t match_codes(const PackedIndex& idx, const PackedText& pat, int64_t s,
                           int64_t from, int64_t to, uint32_t* text_code_at_mismatch) {
    const uint32_t alpha = idx.text.alpha();
    int64_t k = from;
    while (k < to) {
        uint32_t len = static_cast<uint32_t>(std::min<int64_t>(alpha, to - k));
        Chunk pc = pat.extract_chunk(k, len);
        Chunk tc = idx.text.extract_chunk(s + k, len);
        if (auto mm = first_mismatch(pc, tc)) {
            k += *mm;
            *text_code_at_mismatch = tc.code(*mm);
            return k;
        }
        k += len;
    }
    return to;
}

}  // namespace detail

// Answer procedure shared by the short and long paths: dp is an explicit
// node whose string prefixes the pattern with no explicit node between dp
// and the pattern's end or divergence point (a deeper prefixing node only
// appears through promoted single-child chains, which the loop descends).
inline Answer answer_from_dp(const PackedIndex& idx, int32_t dp, std::span<const uint32_t> codes,
                             const PackedText& pat, QueryMode mode, QueryTrace* trace = nullptr) {
    const int64_t m = static_cast<int64_t>(codes.size());
    for (;;) {
        const TreeNode& d = idx.tree.nodes[dp];
        if (trace) trace->dp_node = dp;
        int64_t i = d.depth;
        if (i == m)  // dp represents the pattern
            return detail::range_answer(idx, d.sa_lo, d.sa_hi, mode);

        auto res = child_by_code(idx.tree, dp, codes[i]);
        if (res.kind == ChildLookup::None) {
            // pattern deviates below dp, smaller than every child edge
            Answer ans;
            if (d.sa_lo > 0) ans.pred_rank = d.sa_lo - 1;
            detail::finish_pred(idx, ans);
            return ans;
        }
        const TreeNode& ch = idx.tree.nodes[res.child];
        if (res.kind == ChildLookup::PredEdge) {
            // no edge starts with the next code; the predecessor is the
            // largest string under the nearest edge to the left
            Answer ans;
            ans.pred_rank = ch.sa_hi - 1;
            detail::finish_pred(idx, ans);
            return ans;
        }

        int64_t s = idx.sa.sa[ch.sa_lo];
        int64_t to = std::min<int64_t>(m, ch.depth);
        uint32_t tcode = 0;
        int64_t q = detail::match_codes(idx, pat, s, i, to, &tcode);
        if (q == to) {
            if (to == m)  // pattern continues and ends on this edge
                return detail::range_answer(idx, ch.sa_lo, ch.sa_hi, mode);
            dp = res.child;  // full edge matched: a deeper explicit node prefixes p
            continue;
        }
        // mismatch inside the edge: direction decides the predecessor side
        Answer ans;
        if (codes[q] < tcode) {
            if (ch.sa_lo > 0) ans.pred_rank = ch.sa_lo - 1;
        } else {
            ans.pred_rank = ch.sa_hi - 1;
        }
        detail::finish_pred(idx, ans);
        return ans;
    }
}

namespace detail {

// Does the represented string of node v prefix the pattern? v's string depth
// must not exceed m; characters before `from` are already known to match.
inline bool node_prefixes_pattern(const PackedIndex& idx, int32_t v, const PackedText& pat,
                                  int64_t m, int64_t from) {
    const TreeNode& nd = idx.tree.nodes[v];
    if (nd.depth > m) return false;
    int64_t s = idx.sa.sa[nd.sa_lo];
    uint32_t dummy;
    return match_codes(idx, pat, s, from, nd.depth, &dummy) == nd.depth;
}

inline Answer long_query(const PackedIndex& idx, std::span<const uint32_t> codes,
                         const PackedText& pat, QueryMode mode, QueryTrace* trace) {
    const int64_t m = static_cast<int64_t>(codes.size());
    const int64_t n = static_cast<int64_t>(idx.n());
    const uint32_t alpha = idx.text.alpha();
    const uint32_t bits = idx.text.bits();
    if (trace) trace->long_path = true;

    if (idx.heavy.empty()) {  // n below the heavy threshold: plain packed SA search
        if (trace) trace->sa_fallback = true;
        return searched_answer(idx, pat, 0, n, mode, trace);
    }

    int32_t mt_id = idx.heavy.micro_of_root[idx.tree.root()];
    int64_t matched = 0;
    for (;;) {
        const MicroTree& mt = idx.heavy.micro[mt_id];
        int64_t rem = m - matched;
        if (rem == 0) break;
        if (mt.kind == MicroKind::Type1) {
            if (rem < alpha) break;
            auto hit = mt.nav.lookup(pat.extract_chunk(matched, alpha).word);
            if (!hit) break;
            matched += alpha;
            mt_id = idx.heavy.micro_of_root[static_cast<int32_t>(*hit)];
        } else if (mt.kind == MicroKind::Type2a) {
            if (mt.path_leaf < 0 || rem < alpha) break;
            int64_t s = idx.sa.sa[idx.tree.nodes[mt.path_leaf].sa_lo];
            if (pat.extract_chunk(matched, alpha).word !=
                idx.text.extract_chunk(s + matched, alpha).word)
                break;
            matched += alpha;
            mt_id = idx.heavy.micro_of_root[mt.path_leaf];
        } else {
            if (mt.skip_target < 0) break;
            int64_t span = mt.skip_depth - mt.root_depth;
            if (rem < span) break;
            int64_t s = idx.sa.sa[idx.tree.nodes[mt.skip_target].sa_lo];
            uint32_t dummy;
            if (match_codes(idx, pat, s, matched, matched + span, &dummy) != matched + span)
                break;
            matched += span;
            mt_id = idx.heavy.micro_of_root[mt.skip_target];
        }
        if (trace) ++trace->micro_steps;
    }

    const MicroTree& mt = idx.heavy.micro[mt_id];
    int64_t rem = m - matched;
    if (trace) trace->chars_matched = static_cast<uint64_t>(matched);

    // does the pattern continue through a light child of a heavy node here?
    if (rem > 0 && mt.light_pred.size() > 0) {
        uint32_t qlen = static_cast<uint32_t>(std::min<int64_t>(alpha, rem));
        uint64_t q = encode_key(codes.subspan(matched, qlen), bits, alpha);
        if (trace) ++trace->light_pred_queries;
        if (auto res = mt.light_pred.predecessor(q)) {
            int32_t lnode = static_cast<int32_t>(res->second);
            if (node_prefixes_pattern(idx, lnode, pat, m, matched)) {
                if (trace) trace->light_route = true;
                const TreeNode& ln = idx.tree.nodes[lnode];
                return searched_answer(idx, pat, ln.sa_lo, ln.sa_hi, mode, trace);
            }
        }
    }

    int32_t dp;
    if (mt.kind == MicroKind::Type2b || rem == 0) {
        dp = mt.root;
    } else {
        if (trace) trace->reached_heavy_stage = true;
        uint32_t qlen = static_cast<uint32_t>(std::min<int64_t>(alpha, rem));
        uint64_t p0 = encode_key(codes.subspan(matched, qlen), bits, alpha);
        dp = mt.root;
        if (trace) trace->heavy_pred_queries += 3;
        if (auto r0 = mt.heavy_pred.predecessor(p0)) {
            uint64_t p1 = mask_key_prefix(p0, key_lcp(p0, r0->first, bits, alpha), bits, alpha);
            if (auto r1 = mt.heavy_pred.predecessor(p1)) {
                uint64_t p2 = mask_key_prefix(p0, key_lcp(p0, r1->first, bits, alpha), bits, alpha);
                if (auto r2 = mt.heavy_pred.predecessor(p2)) dp = static_cast<int32_t>(r2->second);
            }
        }
    }
    return answer_from_dp(idx, dp, codes, pat, mode, trace);
}

// Binary search by raw byte order, for predecessor queries on patterns that
// contain bytes outside the alphabet. Suffix bytes come from decoding codes.
inline Answer raw_predecessor(const PackedIndex& idx, std::span<const uint8_t> bytes,
                              QueryMode mode) {
    Answer ans;
    if (mode != QueryMode::Predecessor) return ans;  // count 0 / empty locate
    auto suffix_less = [&](int64_t s) {
        for (int64_t k = 0;; ++k) {
            if (static_cast<size_t>(k) == bytes.size()) return false;  // pattern exhausted
            uint32_t c = idx.text.char_at(s + k);
            if (c == 0) return true;  // suffix exhausted, terminator sorts lowest
            uint8_t b = idx.alphabet.byte_of[c - 1];
            if (b != bytes[k]) return b < bytes[k];
        }
    };
    int64_t lo = 0, hi = static_cast<int64_t>(idx.n());  // first rank with suffix >= pattern
    while (lo < hi) {
        int64_t mid = (lo + hi) / 2;
        if (suffix_less(idx.sa.sa[mid])) lo = mid + 1;
        else hi = mid;
    }
    if (lo > 0) ans.pred_rank = lo - 1;
    finish_pred(idx, ans);
    return ans;
}

}  // namespace detail

enum class Route { Short, Long };

inline Route route(const PackedIndex& idx, size_t m) {
    return idx.short_table.covers(m) ? Route::Short : Route::Long;
}

inline Answer query(const PackedIndex& idx, std::span<const uint8_t> pattern,
                    const QueryOptions& opts = {}) {
    const int64_t n = static_cast<int64_t>(idx.n());
    if (pattern.empty()) {
        // every position matches; no suffix precedes the empty pattern
        Answer ans;
        ans.count = static_cast<uint64_t>(n);
        if (opts.mode == QueryMode::Locate)
            for (int64_t k = 0; k < n; ++k)
                ans.locations.push_back(static_cast<uint64_t>(idx.sa.sa[k]));
        return ans;
    }

    std::vector<uint32_t> codes(pattern.size());
    for (size_t i = 0; i < pattern.size(); ++i) {
        if (!idx.alphabet.contains(pattern[i])) {
            if (opts.trace) opts.trace->out_of_alphabet = true;
            return detail::raw_predecessor(idx, pattern, opts.mode);
        }
        codes[i] = idx.alphabet.code(pattern[i]);
    }

    if (!opts.force_long && route(idx, pattern.size()) == Route::Short) {
        if (opts.trace) opts.trace->short_path = true;
        int32_t dp = lookup_dp(idx.short_table, codes);
        PackedText pat = PackedText::from_codes(codes, idx.alphabet);
        return answer_from_dp(idx, dp, codes, pat, opts.mode, opts.trace);
    }
    PackedText pat = PackedText::from_codes(codes, idx.alphabet);
    return detail::long_query(idx, codes, pat, opts.mode, opts.trace);
}

inline uint64_t count(const PackedIndex& idx, std::span<const uint8_t> p) {
    return query(idx, p, {QueryMode::Count, false, nullptr}).count;
}
inline std::vector<uint64_t> locate(const PackedIndex& idx, std::span<const uint8_t> p) {
    return query(idx, p, {QueryMode::Locate, false, nullptr}).locations;
}
inline std::optional<uint64_t> predecessor(const PackedIndex& idx, std::span<const uint8_t> p) {
    return query(idx, p, {QueryMode::Predecessor, false, nullptr}).pred_pos;
}

}  // namespace pkidx
