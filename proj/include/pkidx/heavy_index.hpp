#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "pkidx/det_containers.hpp"
#include "pkidx/packed_text.hpp"
#include "pkidx/suffix_structures.hpp"

namespace pkidx {

// ============================================================================
// Heavy-node classification
// ============================================================================

// Leaf-count cutoff: max(2, ceil((log2 log2 n)^2)).
inline uint32_t default_threshold(uint64_t n) {
    double lg = std::log2(static_cast<double>(std::max<uint64_t>(n, 2)));
    double ll = std::log2(lg);
    if (ll <= 0.0) return 2;
    return std::max<uint32_t>(2, static_cast<uint32_t>(std::ceil(ll * ll - 1e-9)));
}

struct HeavyClassification {
    uint32_t threshold = 2;
    std::vector<uint8_t> heavy;            // leaf span >= threshold
    std::vector<uint8_t> heavy_branching;  // heavy with >= 2 heavy children
    std::vector<uint8_t> heavy_leaf;       // heavy with no heavy children
    uint64_t heavy_count = 0;
    uint64_t heavy_branching_count = 0;
    uint64_t heavy_leaf_count = 0;
    uint64_t nonbranching_heavy_count = 0;
};

inline HeavyClassification classify_heavy(const SuffixTree& st, uint32_t threshold) {
    HeavyClassification hc;
    hc.threshold = threshold;
    size_t cnt = st.nodes.size();
    hc.heavy.assign(cnt, 0);
    hc.heavy_branching.assign(cnt, 0);
    hc.heavy_leaf.assign(cnt, 0);
    for (size_t v = 0; v < cnt; ++v) {
        const auto& nd = st.nodes[v];
        if (static_cast<uint32_t>(nd.sa_hi - nd.sa_lo) >= threshold) {
            hc.heavy[v] = 1;
            ++hc.heavy_count;
        }
    }
    for (size_t v = 0; v < cnt; ++v) {
        if (!hc.heavy[v]) continue;
        uint32_t heavy_kids = 0;
        for (auto& [code, c] : st.nodes[v].children) heavy_kids += hc.heavy[c];
        if (heavy_kids >= 2) {
            hc.heavy_branching[v] = 1;
            ++hc.heavy_branching_count;
        } else {
            ++hc.nonbranching_heavy_count;
        }
        if (heavy_kids == 0) {
            hc.heavy_leaf[v] = 1;
            ++hc.heavy_leaf_count;
        }
    }
    return hc;
}

// ============================================================================
// Word keys for the predecessor structures
// ============================================================================

// Big-digit-first placement so that integer order equals lexicographic order
// of the $-padded code sequences. The padded tail is code 0.
inline uint64_t encode_key(std::span<const uint32_t> codes, uint32_t bits, uint32_t alpha) {
    if (codes.size() > alpha) throw std::invalid_argument("encode_key: more than alpha codes");
    uint64_t w = 0;
    for (size_t j = 0; j < codes.size(); ++j)
        w |= uint64_t{codes[j]} << ((alpha - 1 - j) * bits);
    return w;
}

inline uint64_t encode_key_from_text(const PackedText& t, uint64_t pos, uint32_t len) {
    uint64_t w = 0;
    for (uint32_t j = 0; j < len; ++j)
        w |= uint64_t{t.char_at(pos + j)} << ((t.alpha() - 1 - j) * t.bits());
    return w;
}

// Number of leading codes two keys share.
inline uint32_t key_lcp(uint64_t a, uint64_t b, uint32_t bits, uint32_t alpha) {
    uint64_t x = a ^ b;
    if (x == 0) return alpha;
    uint32_t h = 63 - static_cast<uint32_t>(std::countl_zero(x));
    return alpha - 1 - h / bits;
}

// Keep the first `keep` codes of a key, zeroing the rest.
inline uint64_t mask_key_prefix(uint64_t key, uint32_t keep, uint32_t bits, uint32_t alpha) {
    uint32_t shift = (alpha - keep) * bits;
    if (shift >= 64) return 0;
    return key & ~((uint64_t{1} << shift) - 1);
}

// ============================================================================
// Micro-tree decomposition
// ============================================================================

enum class MicroKind : uint8_t { Type1 = 1, Type2a = 2, Type2b = 3 };

struct MicroTree {
    int32_t root = -1;
    int32_t root_depth = 0;  // multiple of alpha
    MicroKind kind = MicroKind::Type2b;

    // Type1: exact alpha-code chunk (little-index-first word) -> micro leaf
    std::vector<std::pair<uint64_t, uint32_t>> nav_pairs;
    DetDictionary nav;

    // Type2a: the boundary node at root_depth + alpha, or -1 when the heavy
    // path ends inside this layer
    int32_t path_leaf = -1;

    // Type2b: root of the nearest lower micro tree containing a heavy node;
    // the skip compares pattern characters root_depth..skip_depth
    int32_t skip_target = -1;
    int32_t skip_depth = 0;

    // $-padded path keys from the micro root (big-digit-first words)
    std::vector<std::pair<uint64_t, uint32_t>> light_pairs;
    std::vector<std::pair<uint64_t, uint32_t>> heavy_pairs;
    DetPredecessor light_pred;
    DetPredecessor heavy_pred;

    void rebuild_structures() {
        nav = DetDictionary::build(nav_pairs);
        light_pred = DetPredecessor::build(light_pairs);
        heavy_pred = DetPredecessor::build(heavy_pairs);
    }
};

struct PromotionLedger {
    uint64_t type1_roots = 0;
    uint64_t type1_leaves = 0;
    uint64_t type2a = 0;
    uint64_t type2b = 0;
};

struct HeavyIndex {
    uint32_t threshold = 2;
    HeavyClassification hc;
    std::vector<MicroTree> micro;
    std::vector<int32_t> micro_of_root;  // node id -> micro tree index or -1
    PromotionLedger ledger;

    bool empty() const { return micro.empty(); }
};

namespace detail {

// A point on the heavy tree: either the node itself (depth == node depth) or
// an implicit position that many characters down the edge into `node`.
struct HtPos {
    int32_t node;
    int32_t depth;
};

struct RawLayer {
    HtPos root;
    MicroKind kind;
    std::vector<int32_t> heavy_in_span;  // explicit heavy nodes with depth in [B, B+alpha)
    std::vector<HtPos> crossings;        // heavy continuations at depth B+alpha
    HtPos skip{-1, 0};                   // Type2b continuation target
};

}  // namespace detail

// Decompose the heavy tree into micro trees of string depth alpha, promote
// the boundary nodes the construction needs, and build the per-micro-tree
// navigation and predecessor structures.
inline HeavyIndex build_heavy_index(SuffixTree& st, HeavyClassification hc,
                                    const PackedText& text, const SuffixArrayIndex& ix) {
    using detail::HtPos;
    using detail::RawLayer;

    HeavyIndex hx;
    hx.threshold = hc.threshold;
    const int32_t alpha = static_cast<int32_t>(text.alpha());

    if (st.nodes.empty() || !hc.heavy[st.root()]) {
        hx.hc = std::move(hc);
        hx.micro_of_root.assign(st.nodes.size(), -1);
        return hx;
    }

    // -------- phase A: discover layers on the unmodified tree --------
    std::vector<RawLayer> layers;
    std::vector<HtPos> todo{{st.root(), 0}};
    while (!todo.empty()) {
        HtPos pos = todo.back();
        todo.pop_back();
        const int32_t B = pos.depth;
        RawLayer layer;
        layer.root = pos;

        if (st.nodes[pos.node].depth >= B + alpha && st.nodes[pos.node].depth != B) {
            // the whole span lies inside one edge
            layer.kind = MicroKind::Type2b;
            int32_t vd = st.nodes[pos.node].depth;
            int32_t bt = vd - vd % alpha;
            layer.skip = {pos.node, bt};
            todo.push_back(layer.skip);
            layers.push_back(std::move(layer));
            continue;
        }

        // survey explicit heavy nodes in [B, B+alpha) below pos
        bool branching = false;
        std::vector<int32_t> dfs{pos.node};
        while (!dfs.empty()) {
            int32_t u = dfs.back();
            dfs.pop_back();
            layer.heavy_in_span.push_back(u);
            uint32_t heavy_kids = 0;
            for (auto& [code, c] : st.nodes[u].children) {
                if (!hc.heavy[c]) continue;
                ++heavy_kids;
                if (st.nodes[c].depth < B + alpha) dfs.push_back(c);
                else layer.crossings.push_back({c, B + alpha});
            }
            if (heavy_kids >= 2) branching = true;
        }
        std::sort(layer.heavy_in_span.begin(), layer.heavy_in_span.end());
        std::sort(layer.crossings.begin(), layer.crossings.end(),
                  [](const HtPos& a, const HtPos& b) { return a.node < b.node; });

        bool strict_inside = false;
        for (int32_t u : layer.heavy_in_span)
            if (st.nodes[u].depth > B) strict_inside = true;

        if (branching) {
            layer.kind = MicroKind::Type1;
            for (auto& c : layer.crossings) todo.push_back(c);
        } else if (strict_inside) {
            layer.kind = MicroKind::Type2a;
            if (layer.crossings.size() > 1)
                throw std::logic_error("type 2a micro tree with several crossings");
            for (auto& c : layer.crossings) todo.push_back(c);
        } else {
            // path layer: at most one heavy continuation, arbitrarily far down
            layer.kind = MicroKind::Type2b;
            if (!layer.crossings.empty()) {
                int32_t c = layer.crossings[0].node;
                int32_t vd = st.nodes[c].depth;
                layer.skip = {c, vd - vd % alpha};
                todo.push_back(layer.skip);
            }
            layer.crossings.clear();
        }
        layers.push_back(std::move(layer));
    }

    // -------- phase B: materialize implicit layer roots --------
    std::vector<std::pair<int32_t, int32_t>> split_points;  // (node, depth)
    for (const auto& l : layers) {
        if (l.root.depth != st.nodes[l.root.node].depth)
            split_points.emplace_back(l.root.node, l.root.depth);
    }
    std::sort(split_points.begin(), split_points.end());
    split_points.erase(std::unique(split_points.begin(), split_points.end()),
                       split_points.end());

    std::vector<int32_t> split_id(split_points.size());
    for (size_t i = 0; i < split_points.size(); ++i) {
        auto [node, depth] = split_points[i];
        split_id[i] = split_edge(st, node, depth, text);
        hc.heavy.push_back(1);
        hc.heavy_branching.push_back(0);
        hc.heavy_leaf.push_back(0);
    }
    auto resolve = [&](HtPos pos) -> int32_t {
        if (pos.depth == st.nodes[pos.node].depth) return pos.node;
        auto it = std::lower_bound(split_points.begin(), split_points.end(),
                                   std::make_pair(pos.node, pos.depth));
        return split_id[it - split_points.begin()];
    };
    // Splits rewire edges: an original position {node, d} may now sit below a
    // promoted ancestor, but `node` and d still identify it uniquely.

    // -------- phase C: micro-tree records and their structures --------
    hx.micro_of_root.assign(st.nodes.size(), -1);
    hx.micro.resize(layers.size());
    for (size_t li = 0; li < layers.size(); ++li) {
        const RawLayer& raw = layers[li];
        MicroTree& mt = hx.micro[li];
        const int32_t B = raw.root.depth;
        mt.root = resolve(raw.root);
        mt.root_depth = B;
        mt.kind = raw.kind;
        bool root_promoted = raw.root.depth != st.nodes[raw.root.node].depth;

        if (raw.kind == MicroKind::Type1) {
            for (const auto& c : raw.crossings) {
                int32_t leaf = resolve(c);
                int64_t s = ix.sa[st.nodes[leaf].sa_lo];
                mt.nav_pairs.emplace_back(text.extract_chunk(s + B, alpha).word, leaf);
                if (c.depth != st.nodes[c.node].depth) ++hx.ledger.type1_leaves;
            }
            if (root_promoted) ++hx.ledger.type1_roots;
        } else if (raw.kind == MicroKind::Type2a) {
            if (!raw.crossings.empty()) {
                mt.path_leaf = resolve(raw.crossings[0]);
                if (raw.crossings[0].depth != st.nodes[raw.crossings[0].node].depth)
                    ++hx.ledger.type2a;
            }
            if (root_promoted) ++hx.ledger.type2a;
        } else {
            if (raw.skip.node >= 0) {
                mt.skip_target = resolve(raw.skip);
                mt.skip_depth = raw.skip.depth;
            }
            if (root_promoted) ++hx.ledger.type2b;
        }

        mt.heavy_pairs.emplace_back(0, mt.root);
        for (int32_t u : raw.heavy_in_span) {
            int32_t d = st.nodes[u].depth;
            int64_t s = ix.sa[st.nodes[u].sa_lo];
            if (d > B)
                mt.heavy_pairs.emplace_back(encode_key_from_text(text, s + B, d - B), u);
            for (auto& [code, c] : st.nodes[u].children) {
                if (hc.heavy[c]) continue;
                int32_t cd = std::min(st.nodes[c].depth, B + alpha);
                int64_t cs = ix.sa[st.nodes[c].sa_lo];
                mt.light_pairs.emplace_back(encode_key_from_text(text, cs + B, cd - B), c);
            }
        }
        mt.rebuild_structures();
        hx.micro_of_root[mt.root] = static_cast<int32_t>(li);
    }

    hx.hc = std::move(hc);
    return hx;
}

}  // namespace pkidx
