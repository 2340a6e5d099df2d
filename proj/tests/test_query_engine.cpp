#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "pkidx/naive_index.hpp"
#include "pkidx/query_engine.hpp"
#include "test_support.hpp"

using namespace pkidx;
using tsup::bytes_of;

namespace {

void check_against_naive(const PackedIndex& idx, std::span<const uint8_t> text,
                         std::span<const uint8_t> pat, bool force_long) {
    auto loc_ans = query(idx, pat, {QueryMode::Locate, force_long, nullptr});
    auto pred_ans = query(idx, pat, {QueryMode::Predecessor, force_long, nullptr});
    auto cnt_ans = query(idx, pat, {QueryMode::Count, force_long, nullptr});

    auto loc = loc_ans.locations;
    std::sort(loc.begin(), loc.end());
    REQUIRE(cnt_ans.count == naive::naive_count(text, pat));
    REQUIRE(loc_ans.count == cnt_ans.count);
    REQUIRE(loc == naive::naive_locate(text, pat));
    REQUIRE(pred_ans.pred_pos == naive::naive_predecessor(text, pat));
}

}  // namespace

TEST_CASE("naive oracle hand cases") {
    auto banana = bytes_of("banana");
    CHECK(naive::naive_count(banana, bytes_of("ana")) == 2);
    CHECK(naive::naive_count(banana, banana) == 1);
    CHECK(naive::naive_count(banana, bytes_of("x")) == 0);
    CHECK(naive::naive_locate(banana, bytes_of("ana")) == std::vector<uint64_t>{1, 3});
    CHECK(naive::naive_locate(bytes_of("aaa"), bytes_of("a")) ==
          std::vector<uint64_t>{0, 1, 2});
    CHECK(naive::naive_locate(banana, bytes_of("q")).empty());
    CHECK(naive::naive_predecessor(banana, bytes_of("ana")) == 5u);
    CHECK_FALSE(naive::naive_predecessor(banana, bytes_of("a")));   // nothing below "a"
    CHECK(naive::naive_predecessor(banana, bytes_of("zz")) == 2u);  // "nana" is largest

    auto runs = bytes_of("aaaa");
    CHECK(naive::naive_count(runs, bytes_of("aa")) == 3);
    CHECK(naive::naive_predecessor(runs, bytes_of("aa")) == 3u);  // suffix "a"
    CHECK(naive::naive_predecessor(runs, bytes_of("ab")) == 0u);  // whole text

    auto abra = bytes_of("abracadabra");
    CHECK(naive::naive_count(abra, bytes_of("abra")) == 2);
    CHECK(naive::naive_locate(abra, bytes_of("abra")) == std::vector<uint64_t>{0, 7});
    CHECK(naive::naive_count(abra, bytes_of("a")) == 5);
    CHECK(naive::naive_predecessor(abra, bytes_of("b")) == 5u);  // "adabra"
}

TEST_CASE("banana answers") {
    auto raw = bytes_of("banana");
    auto idx = build_index(raw);

    CHECK(count(idx, bytes_of("ana")) == 2);
    CHECK(locate(idx, bytes_of("ana")) == std::vector<uint64_t>{3, 1});  // sa order
    REQUIRE(predecessor(idx, bytes_of("ana")));
    CHECK(*predecessor(idx, bytes_of("ana")) == 5);

    CHECK(count(idx, raw) == 1);
    CHECK(locate(idx, raw) == std::vector<uint64_t>{0});

    // no suffix sorts below "a": the suffix "a" carries its terminator
    CHECK_FALSE(predecessor(idx, bytes_of("a")));
}

TEST_CASE("empty pattern matches everywhere and has no predecessor") {
    auto idx = build_index(bytes_of("banana"));
    auto ans = query(idx, {}, {QueryMode::Locate, false, nullptr});
    CHECK(ans.count == 6);
    CHECK(ans.locations.size() == 6);
    CHECK_FALSE(query(idx, {}, {QueryMode::Predecessor, false, nullptr}).pred_pos);
}

TEST_CASE("patterns with bytes outside the alphabet") {
    auto raw = bytes_of("banana");
    auto idx = build_index(raw);
    for (auto p : {"x", "nax", "zb", "caa", "b\x01n"}) {
        auto pat = bytes_of(p);
        QueryTrace tr;
        auto ans = query(idx, pat, {QueryMode::Locate, false, &tr});
        CHECK(tr.out_of_alphabet);
        CHECK(ans.count == 0);
        CHECK(ans.locations.empty());
        REQUIRE(query(idx, pat, {QueryMode::Predecessor, false, nullptr}).pred_pos ==
                naive::naive_predecessor(raw, pat));
    }
}

TEST_CASE("routing splits at the table capacity bound") {
    auto idx = build_index(bytes_of("banana"));  // M_s = 1
    REQUIRE(idx.short_table.max_len == 1);
    CHECK(route(idx, 1) == Route::Short);
    CHECK(route(idx, 2) == Route::Long);

    QueryTrace tr;
    query(idx, bytes_of("a"), {QueryMode::Count, false, &tr});
    CHECK(tr.short_path);
    QueryTrace tr2;
    query(idx, bytes_of("an"), {QueryMode::Count, false, &tr2});
    CHECK(tr2.long_path);
}

TEST_CASE("answer_from_dp case analysis") {
    auto raw = bytes_of("banana");
    auto idx = build_index(raw);

    // pattern equal to the string of an explicit node: count is its span
    CHECK(count(idx, bytes_of("ana")) == 2);
    CHECK(count(idx, bytes_of("na")) == 2);

    // deviation below d_P with a code smaller than every child edge
    auto m = query(idx, bytes_of("ab"), {QueryMode::Predecessor, false, nullptr});
    REQUIRE(m.pred_pos);
    CHECK(*m.pred_pos == 5);  // suffix "a"

    // mid-edge mismatch, pattern smaller / larger than the subtree
    check_against_naive(idx, raw, bytes_of("banab"), false);
    check_against_naive(idx, raw, bytes_of("banc"), false);
    check_against_naive(idx, raw, bytes_of("nn"), false);
    check_against_naive(idx, raw, bytes_of("nanan"), false);
}

TEST_CASE("long and short paths agree on short patterns") {
    std::mt19937_64 rng(61);
    uint64_t agreed = 0;
    for (int rep = 0; rep < 40; ++rep) {
        uint32_t pool = 1 + rng() % 5;
        size_t n = 50 + rng() % 1000;
        auto text = rep % 2 ? tsup::random_text(rng, n, pool)
                            : tsup::structured_text(rng, n, pool);
        BuildOptions opts;
        if (rep % 2) opts.force_threshold = 2 + rng() % 3;
        auto idx = build_index(text, opts);
        uint32_t ms = idx.short_table.max_len;
        for (int q = 0; q < 40; ++q) {
            uint32_t len = 1 + rng() % ms;
            std::vector<uint8_t> pat(len);
            for (auto& b : pat) b = text[rng() % n];
            auto s = query(idx, pat, {QueryMode::Locate, false, nullptr});
            auto l = query(idx, pat, {QueryMode::Locate, true, nullptr});
            auto sp = query(idx, pat, {QueryMode::Predecessor, false, nullptr});
            auto lp = query(idx, pat, {QueryMode::Predecessor, true, nullptr});
            REQUIRE(s.count == l.count);
            REQUIRE(s.locations == l.locations);
            REQUIRE(sp.pred_pos == lp.pred_pos);
            ++agreed;
        }
    }
    REQUIRE(agreed >= 1200);
}

TEST_CASE("global differential fuzz across alphabets, lengths and thresholds") {
    std::mt19937_64 rng(62);
    for (int rep = 0; rep < 120; ++rep) {
        uint32_t pools[] = {1, 2, 4, 16, 64, 255};
        uint32_t pool = pools[rep % 6];
        size_t n = 30 + rng() % 1200;
        auto text = rep % 2 ? tsup::random_text(rng, n, pool)
                            : tsup::structured_text(rng, n, pool);
        BuildOptions opts;
        if (rep % 3) opts.force_threshold = 2 + rng() % 7;
        auto idx = build_index(text, opts);
        uint32_t alpha = idx.alphabet.alpha;
        size_t lens[] = {1,
                         idx.short_table.max_len,
                         idx.short_table.max_len + 1,
                         alpha - 1,
                         alpha,
                         alpha + 1,
                         2 * alpha + 3,
                         n};
        for (int q = 0; q < 40; ++q) {
            size_t len = q < 8 ? lens[q] : 1 + rng() % std::min<size_t>(n, 3 * alpha);
            len = std::clamp<size_t>(len, 1, n);
            std::vector<uint8_t> pat(len);
            switch (q % 3) {
                case 0: {
                    size_t pos = rng() % (n - len + 1);
                    std::copy_n(text.begin() + pos, len, pat.begin());
                    break;
                }
                case 1: {
                    size_t pos = rng() % (n - len + 1);
                    std::copy_n(text.begin() + pos, len, pat.begin());
                    pat[rng() % len] = static_cast<uint8_t>(rng() % (pool + 2));
                    break;
                }
                default:
                    for (auto& b : pat) b = static_cast<uint8_t>(rng() % (pool + 2));
            }
            check_against_naive(idx, text, pat, false);
        }
    }
}

TEST_CASE("traced long queries resolve d_P to the deepest prefixing node") {
    std::mt19937_64 rng(63);
    uint64_t reached = 0;
    for (int rep = 0; rep < 80; ++rep) {
        uint32_t pool = 1 + rng() % 4;
        auto text = tsup::structured_text(rng, 200 + rng() % 1500, pool);
        BuildOptions opts;
        opts.force_threshold = 2 + rep % 3;
        auto idx = build_index(text, opts);
        for (int q = 0; q < 60; ++q) {
            size_t pos = rng() % text.size();
            size_t len = 1 + rng() % std::min<size_t>(text.size() - pos,
                                                      3 * idx.alphabet.alpha + 5);
            std::vector<uint8_t> pat(text.begin() + pos, text.begin() + pos + len);
            if (q % 2) pat[rng() % len] = text[rng() % text.size()];

            QueryTrace tr;
            query(idx, pat, {QueryMode::Count, true, &tr});
            if (!tr.reached_heavy_stage) continue;
            ++reached;
            REQUIRE(tr.heavy_pred_queries <= 3);
            std::vector<uint32_t> codes(pat.size());
            for (size_t i = 0; i < pat.size(); ++i) codes[i] = idx.alphabet.code(pat[i]);
            REQUIRE(tr.dp_node == naive::naive_deepest_prefix_node(idx.tree, idx.text, codes));
        }
    }
    REQUIRE(reached >= 500);
}

TEST_CASE("locate is complete and ordered by rank") {
    std::mt19937_64 rng(64);
    auto text = tsup::structured_text(rng, 700, 2);
    auto idx = build_index(text);
    for (int q = 0; q < 200; ++q) {
        size_t pos = rng() % text.size();
        size_t len = 1 + rng() % std::min<size_t>(text.size() - pos, 60);
        std::vector<uint8_t> pat(text.begin() + pos, text.begin() + pos + len);
        auto ans = query(idx, pat, {QueryMode::Locate, false, nullptr});
        REQUIRE(ans.count == ans.locations.size());
        // sa-order output: ranks are increasing
        for (size_t i = 1; i < ans.locations.size(); ++i)
            REQUIRE(idx.sa.rank[ans.locations[i - 1]] < idx.sa.rank[ans.locations[i]]);
        // completeness against a sliding-window scan
        auto sorted = ans.locations;
        std::sort(sorted.begin(), sorted.end());
        REQUIRE(sorted == naive::naive_locate(text, pat));
        // predecessor sits one rank below the match range when it exists
        auto pred = query(idx, pat, {QueryMode::Predecessor, false, nullptr});
        if (!ans.locations.empty()) {
            int64_t lo = idx.sa.rank[ans.locations[0]];
            if (lo > 0) {
                REQUIRE(pred.pred_rank);
                REQUIRE(*pred.pred_rank == lo - 1);
            } else {
                REQUIRE_FALSE(pred.pred_rank);
            }
        }
    }
}
