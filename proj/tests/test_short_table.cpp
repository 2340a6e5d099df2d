#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "pkidx/naive_index.hpp"
#include "pkidx/query_engine.hpp"
#include "pkidx/short_table.hpp"
#include "test_support.hpp"

using namespace pkidx;
using tsup::bytes_of;

namespace {

// inverse of pattern_index, for the bijection check
std::vector<uint32_t> decode_index(const ShortPatternTable& tab, uint64_t ix) {
    uint32_t len = tab.max_len;
    while (len > 1 && tab.offsets[len] > ix) --len;
    uint64_t d = ix - tab.offsets[len];
    std::vector<uint32_t> p(len);
    for (uint32_t j = len; j-- > 0;) {
        p[j] = static_cast<uint32_t>(d % tab.sigma) + 1;
        d /= tab.sigma;
    }
    return p;
}

}  // namespace

TEST_CASE("pattern_index is the base-sigma enumeration") {
    ShortPatternTable t2;
    t2.sigma = 2;
    t2.max_len = 3;
    t2.offsets = {0, 0, 2, 6};
    CHECK(pattern_index(t2, std::vector<uint32_t>{1}) == 0);
    CHECK(pattern_index(t2, std::vector<uint32_t>{2}) == 1);
    CHECK(pattern_index(t2, std::vector<uint32_t>{1, 1}) == 2);
    CHECK(pattern_index(t2, std::vector<uint32_t>{2, 2}) == 5);

    ShortPatternTable t3;
    t3.sigma = 3;
    t3.max_len = 2;
    t3.offsets = {0, 0, 3};
    CHECK(pattern_index(t3, std::vector<uint32_t>{2, 1}) == 6);

    CHECK_THROWS_AS(pattern_index(t3, std::vector<uint32_t>{1, 1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(pattern_index(t3, std::vector<uint32_t>{}), std::invalid_argument);
}

TEST_CASE("pattern_index round-trips through its inverse") {
    std::mt19937_64 rng(31);
    ShortPatternTable tab;
    tab.sigma = 5;
    tab.max_len = 6;
    tab.offsets.assign(tab.max_len + 1, 0);
    uint64_t off = 0, powl = tab.sigma;
    for (uint32_t len = 1; len <= tab.max_len; ++len) {
        tab.offsets[len] = off;
        off += powl;
        powl *= tab.sigma;
    }
    for (int rep = 0; rep < 2000; ++rep) {
        uint32_t len = 1 + rng() % tab.max_len;
        std::vector<uint32_t> p(len);
        for (auto& c : p) c = 1 + rng() % tab.sigma;
        REQUIRE(decode_index(tab, pattern_index(tab, p)) == p);
    }
}

TEST_CASE("table capacity rule") {
    // sigma=3, n=6: 3 <= 6 but 3+9 > 6, so only length-1 patterns fit
    auto idx = build_index(bytes_of("banana"));
    CHECK(idx.short_table.max_len == 1);
    CHECK(idx.short_table.entries.size() == 3);

    // sigma=1: the table covers every length up to n
    auto runs = build_index(bytes_of("aaaa"));
    CHECK(runs.short_table.max_len == 4);
    CHECK(runs.short_table.entries.size() == 4);
}

TEST_CASE("banana and run-text lookups match the walk oracle") {
    auto idx = build_index(bytes_of("banana"));
    auto a_code = idx.alphabet.code('a');
    auto b_code = idx.alphabet.code('b');

    int32_t dp_a = lookup_dp(idx.short_table, std::vector<uint32_t>{a_code});
    CHECK(idx.tree.nodes[dp_a].depth == 1);  // explicit "a" node
    CHECK(idx.tree.nodes[dp_a].sa_lo == 0);
    CHECK(idx.tree.nodes[dp_a].sa_hi == 3);

    // no explicit node below the root prefixes "b"
    int32_t dp_b = lookup_dp(idx.short_table, std::vector<uint32_t>{b_code});
    CHECK(dp_b == idx.tree.root());

    auto runs = build_index(bytes_of("aaaa"));
    for (uint32_t len = 1; len <= runs.short_table.max_len; ++len) {
        std::vector<uint32_t> p(len, 1);
        int32_t dp = lookup_dp(runs.short_table, p);
        REQUIRE(dp == naive::naive_deepest_prefix_node(runs.tree, runs.text, p));
        CHECK(runs.tree.nodes[dp].depth <= static_cast<int32_t>(len));
    }
}

TEST_CASE("every entry equals the brute-force deepest prefixing node") {
    std::mt19937_64 rng(32);
    for (int rep = 0; rep < 60; ++rep) {
        uint32_t pool = 1 + rng() % 4;
        size_t n = 1 + rng() % 2000;
        auto text = rep % 2 ? tsup::random_text(rng, n, pool)
                            : tsup::structured_text(rng, n, pool);
        auto idx = build_index(text);
        const auto& tab = idx.short_table;
        REQUIRE(tab.entries.size() <= n);
        REQUIRE(tab.max_len >= 1);  // sigma <= n always holds
        bool all_filled = true;
        for (int32_t e : tab.entries) all_filled = all_filled && e >= 0;
        REQUIRE(all_filled);  // the fill touches every slot

        // exhaustive when the universe is small (it is: entries <= n <= 2000)
        for (uint64_t i = 0; i < tab.entries.size(); ++i) {
            auto p = decode_index(tab, i);
            REQUIRE(pattern_index(tab, p) == i);
            REQUIRE(tab.entries[i] == naive::naive_deepest_prefix_node(idx.tree, idx.text, p));
        }
    }
}

TEST_CASE("sampled entries on larger alphabets") {
    std::mt19937_64 rng(33);
    for (uint32_t pool : {16u, 64u, 200u}) {
        auto text = tsup::random_text(rng, 1500, pool);
        auto idx = build_index(text);
        const auto& tab = idx.short_table;
        REQUIRE(tab.entries.size() <= text.size());
        for (int rep = 0; rep < 3000; ++rep) {
            uint32_t len = 1 + rng() % tab.max_len;
            std::vector<uint32_t> p(len);
            for (auto& c : p) c = 1 + rng() % idx.alphabet.sigma;
            REQUIRE(lookup_dp(tab, p) ==
                    naive::naive_deepest_prefix_node(idx.tree, idx.text, p));
        }
    }
}
