#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pkidx/naive_index.hpp"
#include "pkidx/query_engine.hpp"

namespace pkidx {

struct VerifyCheck {
    std::string name;
    bool pass = true;
    uint64_t checked = 0;
    std::string detail;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;
    bool all_pass() const {
        for (auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

// Structural and differential checks over a built (or loaded) index.
// `samples` scales the sampled suites; 0 runs the structural checks only.
inline VerifyReport verify_index(const PackedIndex& idx, uint64_t samples = 100,
                                 uint64_t seed = 0x5eed) {
    VerifyReport rep;
    std::mt19937_64 rng(seed);
    const int64_t n = static_cast<int64_t>(idx.n());
    auto text = decode_text(idx);

    {   // suffix array: permutation, sampled adjacent order and lcp values
        VerifyCheck c{"sa-structure"};
        std::vector<uint8_t> seen(n, 0);
        for (int64_t i = 0; i < n; ++i) {
            int32_t s = idx.sa.sa[i];
            if (s < 0 || s >= n || seen[s]) {
                c.pass = false;
                c.detail = "not a permutation at rank " + std::to_string(i);
                break;
            }
            seen[s] = 1;
            if (idx.sa.rank[s] != i) {
                c.pass = false;
                c.detail = "rank inverse broken at " + std::to_string(i);
                break;
            }
        }
        uint64_t probes = samples == 0 ? std::min<int64_t>(n, 64) : samples;
        for (uint64_t k = 0; c.pass && k < probes && n > 1; ++k) {
            int64_t i = 1 + static_cast<int64_t>(rng() % (n - 1));
            int64_t a = idx.sa.sa[i - 1], b = idx.sa.sa[i];
            int64_t h = 0;
            while (a + h < n && b + h < n && text[a + h] == text[b + h]) ++h;
            bool order_ok = (a + h == n) || (b + h < n && text[a + h] < text[b + h]);
            if (!order_ok || idx.sa.lcp[i] != h) {
                c.pass = false;
                c.detail = "order/lcp mismatch at rank " + std::to_string(i);
            }
            ++c.checked;
        }
        rep.checks.push_back(std::move(c));
    }

    {   // lcp range-minimum queries vs direct scans
        VerifyCheck c{"lcp-rmq"};
        uint64_t probes = samples == 0 ? 32 : samples;
        for (uint64_t k = 0; k < probes && n > 0; ++k) {
            int64_t i = static_cast<int64_t>(rng() % n), j = static_cast<int64_t>(rng() % n);
            int64_t a = idx.sa.sa[i], b = idx.sa.sa[j], h = 0;
            if (i == j) h = n - a;
            else
                while (a + h < n && b + h < n && text[a + h] == text[b + h]) ++h;
            if (idx.sa.lcp_query(i, j) != h) {
                c.pass = false;
                c.detail = "lcp_query(" + std::to_string(i) + "," + std::to_string(j) + ")";
                break;
            }
            ++c.checked;
        }
        rep.checks.push_back(std::move(c));
    }

    {   // tree wiring: ranges partition, codes sorted, arity, sampled spellings
        VerifyCheck c{"tree-structure"};
        for (size_t v = 0; c.pass && v < idx.tree.nodes.size(); ++v) {
            const auto& nd = idx.tree.nodes[v];
            bool promoted = static_cast<int64_t>(v) >= idx.tree.orig_node_count;
            if (!nd.children.empty()) {
                int32_t at = nd.sa_lo;
                uint32_t prev_code = 0;
                bool first = true;
                for (auto& [code, ch] : nd.children) {
                    const auto& cn = idx.tree.nodes[ch];
                    if (cn.parent != static_cast<int32_t>(v) || cn.sa_lo != at ||
                        cn.depth <= nd.depth || (!first && code <= prev_code)) {
                        c.pass = false;
                        c.detail = "child wiring at node " + std::to_string(v);
                        break;
                    }
                    at = cn.sa_hi;
                    prev_code = code;
                    first = false;
                }
                if (at != nd.sa_hi) {
                    c.pass = false;
                    c.detail = "children do not cover node " + std::to_string(v);
                }
                if (v != 0 && !promoted && nd.children.size() < 2) {
                    c.pass = false;
                    c.detail = "unary internal node " + std::to_string(v);
                }
            }
            ++c.checked;
        }
        uint64_t probes = samples == 0 ? 16 : samples;
        for (uint64_t k = 0; c.pass && k < probes && n > 0; ++k) {
            // leaf spelling: concatenated edge labels equal suffix plus terminator
            int64_t i = static_cast<int64_t>(rng() % n);
            int32_t v = idx.tree.leaf_of_sa[i];
            int64_t expect_len = n - idx.sa.sa[i] + 1;
            if (idx.tree.nodes[v].depth != expect_len) {
                c.pass = false;
                c.detail = "leaf depth at rank " + std::to_string(i);
                break;
            }
            for (int32_t u = v; u != 0 && c.pass; u = idx.tree.nodes[u].parent) {
                const auto& un = idx.tree.nodes[u];
                int32_t pdepth = idx.tree.nodes[un.parent].depth;
                for (int32_t e = un.edge_start; e < un.edge_end; ++e) {
                    int64_t off = idx.sa.sa[i] + pdepth + (e - un.edge_start);
                    if (idx.text.char_at(e) != idx.text.char_at(off)) {
                        c.pass = false;
                        c.detail = "edge label mismatch under leaf rank " + std::to_string(i);
                        break;
                    }
                }
            }
        }
        rep.checks.push_back(std::move(c));
    }

    {   // short table entries vs brute-force tree walks
        VerifyCheck c{"short-table"};
        if (idx.short_table.entries.size() > idx.n()) {
            c.pass = false;
            c.detail = "table larger than n";
        }
        uint64_t probes = samples == 0 ? 0 : samples;
        for (uint64_t k = 0; c.pass && k < probes && idx.short_table.max_len > 0; ++k) {
            uint32_t len = 1 + static_cast<uint32_t>(rng() % idx.short_table.max_len);
            std::vector<uint32_t> p(len);
            for (auto& x : p) x = 1 + static_cast<uint32_t>(rng() % idx.alphabet.sigma);
            int32_t got = lookup_dp(idx.short_table, p);
            int32_t want = naive::naive_deepest_prefix_node(idx.tree, idx.text, p);
            if (got != want) {
                c.pass = false;
                c.detail = "entry disagrees with tree walk";
            }
            ++c.checked;
        }
        rep.checks.push_back(std::move(c));
    }

    {   // heavy structure: count bounds, promotion ledger, navigation soundness
        VerifyCheck c{"heavy-bounds"};
        const auto& hc = idx.heavy.hc;
        const auto& lg = idx.heavy.ledger;
        uint64_t t = idx.heavy.threshold;
        if (hc.heavy_leaf_count * t > idx.n()) {
            c.pass = false;
            c.detail = "heavy leaf count above n/t";
        } else if (hc.heavy_branching_count * t > idx.n()) {
            c.pass = false;
            c.detail = "heavy branching count above n/t";
        } else if (lg.type2a > 2 * hc.nonbranching_heavy_count) {
            c.pass = false;
            c.detail = "type 2a promotions above bound";
        } else if (lg.type2b > hc.heavy_count) {
            c.pass = false;
            c.detail = "type 2b promotions above bound";
        } else if ((lg.type1_roots + lg.type1_leaves) * t > 3 * idx.n()) {
            c.pass = false;
            c.detail = "type 1 promotions above bound";
        }
        rep.checks.push_back(std::move(c));
    }

    {   // every micro-leaf chunk hashes back to its leaf; perturbed chunks miss
        VerifyCheck c{"micro-navigation"};
        for (const auto& mt : idx.heavy.micro) {
            for (auto& [key, leaf] : mt.nav_pairs) {
                auto hit = mt.nav.lookup(key);
                if (!hit || *hit != leaf) {
                    c.pass = false;
                    c.detail = "nav lookup broken in micro tree at node " +
                               std::to_string(mt.root);
                    break;
                }
                auto miss = mt.nav.lookup(key ^ 1);
                bool legit = false;  // flipped key may still be a real chunk
                for (auto& [k2, l2] : mt.nav_pairs)
                    if (k2 == (key ^ 1)) legit = true;
                if (!legit && miss) {
                    c.pass = false;
                    c.detail = "nav returns a node for an absent chunk";
                    break;
                }
                ++c.checked;
            }
            if (!c.pass) break;
        }
        rep.checks.push_back(std::move(c));
    }

    {   // micro coverage: each heavy node in exactly one micro tree
        VerifyCheck c{"micro-coverage"};
        if (!idx.heavy.empty()) {
            std::vector<uint32_t> hits(idx.tree.nodes.size(), 0);
            for (const auto& mt : idx.heavy.micro)
                for (auto& [key, node] : mt.heavy_pairs) ++hits[node];
            for (size_t v = 0; v < idx.tree.nodes.size(); ++v) {
                if (idx.heavy.hc.heavy[v] != (hits[v] > 0) || hits[v] > 1) {
                    c.pass = false;
                    c.detail = "heavy node " + std::to_string(v) + " covered " +
                               std::to_string(hits[v]) + " times";
                    break;
                }
                ++c.checked;
            }
        }
        rep.checks.push_back(std::move(c));
    }

    if (samples > 0) {  // differential queries against the naive scans
        VerifyCheck c{"differential-queries"};
        for (uint64_t k = 0; k < samples && n > 0; ++k) {
            size_t pos = rng() % n;
            size_t len = 1 + rng() % std::min<size_t>(n - pos, 64);
            std::vector<uint8_t> pat(text.begin() + pos, text.begin() + pos + len);
            if (k % 3 == 1) pat[rng() % pat.size()] = static_cast<uint8_t>(rng());
            if (k % 3 == 2)
                for (auto& b : pat) b = static_cast<uint8_t>(rng());
            auto ans = query(idx, pat, {QueryMode::Locate, false, nullptr});
            auto pred = query(idx, pat, {QueryMode::Predecessor, false, nullptr});
            auto loc = ans.locations;
            std::sort(loc.begin(), loc.end());
            if (ans.count != naive::naive_count(text, pat) ||
                loc != naive::naive_locate(text, pat) ||
                pred.pred_pos != naive::naive_predecessor(text, pat)) {
                c.pass = false;
                c.detail = "indexed and naive answers disagree";
                break;
            }
            ++c.checked;
        }
        rep.checks.push_back(std::move(c));
    }
    return rep;
}

}  // namespace pkidx
