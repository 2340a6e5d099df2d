#pragma once

#include <algorithm>
#include <bit>
#include <cassert>
#include <cstdint>
#include <vector>

#include "pkidx/packed_text.hpp"

namespace pkidx {

namespace detail {

// SA-IS induced sorting. s[0..n-1] over [0, K), s[n-1] == 0 and 0 occurs
// nowhere else. Writes the suffix array of all n suffixes into sa.
inline void sais(const int32_t* s, int32_t* sa, int32_t n, int32_t K) {
    if (n == 1) {
        sa[0] = 0;
        return;
    }
    std::vector<uint8_t> stype(n);
    stype[n - 1] = 1;
    for (int32_t i = n - 2; i >= 0; --i)
        stype[i] = (s[i] < s[i + 1] || (s[i] == s[i + 1] && stype[i + 1])) ? 1 : 0;
    auto is_lms = [&](int32_t i) { return i > 0 && stype[i] && !stype[i - 1]; };

    std::vector<int32_t> counts(K, 0), bkt(K);
    for (int32_t i = 0; i < n; ++i) ++counts[s[i]];
    auto bucket_starts = [&] {
        int32_t sum = 0;
        for (int32_t c = 0; c < K; ++c) {
            bkt[c] = sum;
            sum += counts[c];
        }
    };
    auto bucket_ends = [&] {
        int32_t sum = 0;
        for (int32_t c = 0; c < K; ++c) {
            sum += counts[c];
            bkt[c] = sum;
        }
    };

    auto induce = [&] {
        bucket_starts();
        for (int32_t i = 0; i < n; ++i) {
            int32_t j = sa[i] - 1;
            if (sa[i] > 0 && !stype[j]) sa[bkt[s[j]]++] = j;
        }
        bucket_ends();
        for (int32_t i = n - 1; i >= 0; --i) {
            int32_t j = sa[i] - 1;
            if (sa[i] > 0 && stype[j]) sa[--bkt[s[j]]] = j;
        }
    };

    std::vector<int32_t> lms;
    for (int32_t i = 1; i < n; ++i)
        if (is_lms(i)) lms.push_back(i);

    std::fill(sa, sa + n, -1);
    bucket_ends();
    for (auto it = lms.rbegin(); it != lms.rend(); ++it) sa[--bkt[s[*it]]] = *it;
    induce();

    std::vector<int32_t> sorted_lms;
    sorted_lms.reserve(lms.size());
    for (int32_t i = 0; i < n; ++i)
        if (is_lms(sa[i])) sorted_lms.push_back(sa[i]);

    // name LMS substrings in their sorted order
    std::vector<int32_t> name_of(n / 2 + 1, -1);
    int32_t names = 0;
    int32_t prev = -1;
    for (int32_t x : sorted_lms) {
        bool differ = true;
        if (prev >= 0) {
            differ = false;
            for (int32_t d = 0;; ++d) {
                if (s[x + d] != s[prev + d] || stype[x + d] != stype[prev + d]) {
                    differ = true;
                    break;
                }
                if (d > 0 && (is_lms(x + d) || is_lms(prev + d))) {
                    differ = !(is_lms(x + d) && is_lms(prev + d));
                    break;
                }
            }
        }
        if (differ) ++names;
        name_of[x / 2] = names - 1;
        prev = x;
    }

    if (names < static_cast<int32_t>(lms.size())) {
        std::vector<int32_t> s1(lms.size());
        size_t j = 0;
        for (int32_t i = 1; i < n; ++i)
            if (is_lms(i)) s1[j++] = name_of[i / 2];
        std::vector<int32_t> sa1(lms.size());
        sais(s1.data(), sa1.data(), static_cast<int32_t>(s1.size()), names);
        for (size_t i = 0; i < lms.size(); ++i) sorted_lms[i] = lms[sa1[i]];
    } else {
        for (size_t i = 0; i < lms.size(); ++i) sorted_lms[name_of[lms[i] / 2]] = lms[i];
    }

    std::fill(sa, sa + n, -1);
    bucket_ends();
    for (auto it = sorted_lms.rbegin(); it != sorted_lms.rend(); ++it) sa[--bkt[s[*it]]] = *it;
    induce();
}

}  // namespace detail

// Suffix array over the n nonempty suffixes (the terminator-only suffix is
// not indexed), with inverse permutation, LCP array and a sparse-table
// range-minimum structure for LCP(i,j) queries.
struct SuffixArrayIndex {
    std::vector<int32_t> sa;    // sa[i] = start of the i-th smallest suffix
    std::vector<int32_t> rank;  // rank[sa[i]] = i
    std::vector<int32_t> lcp;   // lcp[i] = |lcp(suffix sa[i-1], suffix sa[i])|, lcp[0] = 0
    std::vector<std::vector<int32_t>> rmq;  // rmq[k][i] = min lcp[i .. i+2^k)

    int64_t n() const { return static_cast<int64_t>(sa.size()); }

    // exact LCP length of the suffixes at ranks i and j
    int32_t lcp_query(int64_t i, int64_t j) const {
        if (i == j) return static_cast<int32_t>(n() - sa[i]);
        int64_t a = std::min(i, j) + 1, b = std::max(i, j);  // min over lcp[a..b]
        uint32_t k = std::bit_width(static_cast<uint64_t>(b - a + 1)) - 1;
        return std::min(rmq[k][a], rmq[k][b - (int64_t{1} << k) + 1]);
    }
};

inline SuffixArrayIndex build_suffix_array(const PackedText& t) {
    const int64_t n = static_cast<int64_t>(t.size());
    std::vector<int32_t> codes(n + 1);
    for (int64_t i = 0; i <= n; ++i) codes[i] = static_cast<int32_t>(t.char_at(i));

    std::vector<int32_t> full(n + 1);
    int32_t maxc = 0;
    for (int32_t c : codes) maxc = std::max(maxc, c);
    detail::sais(codes.data(), full.data(), static_cast<int32_t>(n + 1), maxc + 1);

    SuffixArrayIndex ix;
    ix.sa.assign(full.begin() + 1, full.end());  // drop the terminator-only suffix
    ix.rank.assign(n, 0);
    for (int64_t i = 0; i < n; ++i) ix.rank[ix.sa[i]] = static_cast<int32_t>(i);

    // Kasai
    ix.lcp.assign(n, 0);
    int32_t h = 0;
    for (int64_t i = 0; i < n; ++i) {
        int32_t r = ix.rank[i];
        if (r == 0) {
            h = 0;
            continue;
        }
        int64_t j = ix.sa[r - 1];
        while (codes[i + h] == codes[j + h]) ++h;  // terminator is unique, loop stops
        ix.lcp[r] = h;
        if (h > 0) --h;
    }

    if (n > 0) {
        uint32_t levels = std::bit_width(static_cast<uint64_t>(n));
        ix.rmq.resize(levels);
        ix.rmq[0] = ix.lcp;
        for (uint32_t k = 1; k < levels; ++k) {
            int64_t len = int64_t{1} << k;
            ix.rmq[k].resize(n - len + 1);
            for (int64_t i = 0; i + len <= n; ++i)
                ix.rmq[k][i] = std::min(ix.rmq[k - 1][i], ix.rmq[k - 1][i + len / 2]);
        }
    }
    return ix;
}

struct TreeNode {
    int32_t parent = -1;
    int32_t depth = 0;  // string depth in characters; leaf depths include the terminator
    int32_t sa_lo = 0, sa_hi = 0;           // half-open sa-rank range
    int32_t edge_start = 0, edge_end = 0;   // text span of the incoming edge label
    std::vector<std::pair<uint32_t, int32_t>> children;  // (first edge code, child), code-sorted
};

struct SuffixTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    std::vector<int32_t> leaf_of_sa;
    int64_t orig_node_count = 0;  // nodes beyond this index were promoted later

    int32_t root() const { return 0; }
    bool is_leaf(int32_t v) const { return nodes[v].children.empty(); }
    int64_t suffix_of(int32_t v, const SuffixArrayIndex& ix) const {
        return ix.sa[nodes[v].sa_lo];
    }
};

// Left-to-right construction over sa/lcp: maintain the rightmost root-to-leaf
// path on a stack, closing nodes when the lcp drops.
inline SuffixTree build_suffix_tree(const SuffixArrayIndex& ix, const PackedText& t) {
    const int32_t n = static_cast<int32_t>(ix.sa.size());
    SuffixTree st;
    st.nodes.emplace_back();  // root
    st.leaf_of_sa.assign(n, -1);

    std::vector<int32_t> stack{0};
    auto attach = [&](int32_t par, int32_t ch) {
        st.nodes[ch].parent = par;
        st.nodes[par].children.emplace_back(0, ch);
    };

    for (int32_t i = 0; i < n; ++i) {
        int32_t l = (i == 0) ? 0 : ix.lcp[i];
        int32_t last = -1;
        while (st.nodes[stack.back()].depth > l) {
            int32_t v = stack.back();
            stack.pop_back();
            st.nodes[v].sa_hi = i;
            if (last != -1) attach(v, last);
            last = v;
        }
        if (last != -1) {
            if (st.nodes[stack.back()].depth == l) {
                attach(stack.back(), last);
            } else {
                TreeNode nd;
                nd.depth = l;
                nd.sa_lo = st.nodes[last].sa_lo;
                st.nodes.push_back(nd);
                int32_t u = static_cast<int32_t>(st.nodes.size()) - 1;
                attach(u, last);
                stack.push_back(u);
            }
        }
        TreeNode leaf;
        leaf.depth = n - ix.sa[i] + 1;
        leaf.sa_lo = i;
        leaf.sa_hi = i + 1;
        st.nodes.push_back(leaf);
        int32_t leaf_id = static_cast<int32_t>(st.nodes.size()) - 1;
        st.leaf_of_sa[i] = leaf_id;
        stack.push_back(leaf_id);
    }
    int32_t last = -1;
    while (!stack.empty()) {
        int32_t v = stack.back();
        stack.pop_back();
        st.nodes[v].sa_hi = n;
        if (last != -1) attach(v, last);
        last = v;
    }

    // edge labels and child codes, now that parents are final
    for (int32_t v = 1; v < static_cast<int32_t>(st.nodes.size()); ++v) {
        auto& nd = st.nodes[v];
        int64_t start = ix.sa[nd.sa_lo];
        nd.edge_start = static_cast<int32_t>(start) + st.nodes[nd.parent].depth;
        nd.edge_end = static_cast<int32_t>(start) + nd.depth;
    }
    for (auto& nd : st.nodes) {
        for (auto& [code, ch] : nd.children) code = t.char_at(st.nodes[ch].edge_start);
        std::sort(nd.children.begin(), nd.children.end());
    }
    st.orig_node_count = static_cast<int64_t>(st.nodes.size());
    return st;
}

struct ChildLookup {
    enum Kind { Exact, PredEdge, None } kind;
    int32_t child;
};

// Exact child whose edge starts with c, else the child with the largest
// first code below c, else nothing.
inline ChildLookup child_by_code(const SuffixTree& st, int32_t v, uint32_t c) {
    const auto& ch = st.nodes[v].children;
    auto it = std::lower_bound(ch.begin(), ch.end(), c,
                               [](const auto& p, uint32_t cc) { return p.first < cc; });
    if (it != ch.end() && it->first == c) return {ChildLookup::Exact, it->second};
    if (it == ch.begin()) return {ChildLookup::None, -1};
    return {ChildLookup::PredEdge, std::prev(it)->second};
}

// Materialize an implicit node at string depth d on the edge into child.
inline int32_t split_edge(SuffixTree& st, int32_t child, int32_t d, const PackedText& t) {
    int32_t par = st.nodes[child].parent;
    assert(st.nodes[par].depth < d && d < st.nodes[child].depth);
    TreeNode nd;
    nd.parent = par;
    nd.depth = d;
    nd.sa_lo = st.nodes[child].sa_lo;
    nd.sa_hi = st.nodes[child].sa_hi;
    nd.edge_start = st.nodes[child].edge_start;
    nd.edge_end = nd.edge_start + (d - st.nodes[par].depth);
    st.nodes.push_back(nd);
    int32_t id = static_cast<int32_t>(st.nodes.size()) - 1;

    auto& cn = st.nodes[child];
    cn.parent = id;
    cn.edge_start = cn.edge_end - (cn.depth - d);
    st.nodes[id].children.emplace_back(t.char_at(cn.edge_start), child);
    for (auto& [code, c] : st.nodes[par].children)
        if (c == child) {
            c = id;
            break;
        }
    return id;
}

}  // namespace pkidx
