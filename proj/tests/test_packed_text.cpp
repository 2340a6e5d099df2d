#include <catch2/catch_amalgamated.hpp>

#include "pkidx/packed_text.hpp"
#include "test_support.hpp"

using namespace pkidx;
using tsup::bytes_of;

TEST_CASE("alphabet assigns codes in ascending byte order") {
    auto a = build_alphabet(bytes_of("banana"));
    CHECK(a.sigma == 3);
    CHECK(a.code('a') == 1);
    CHECK(a.code('b') == 2);
    CHECK(a.code('n') == 3);
    CHECK(a.bits == 2);
    CHECK(a.alpha == 32);
    CHECK_FALSE(a.contains('x'));
}

TEST_CASE("alphabet degenerate and DNA-sized cases") {
    auto one = build_alphabet(bytes_of("aaaa"));
    CHECK(one.sigma == 1);
    CHECK(one.bits == 1);
    CHECK(one.alpha == 64);

    // four symbols need three bits once the terminator code is reserved
    auto dna = build_alphabet(bytes_of("ACGTGA"));
    CHECK(dna.sigma == 4);
    CHECK(dna.bits == 3);
    CHECK(dna.alpha == 21);

    CHECK_THROWS_WITH(build_alphabet({}), "empty text");
}

TEST_CASE("pack stores codes low bits first with terminator zero") {
    auto a = build_alphabet(bytes_of("ab"));
    auto t = PackedText::pack(bytes_of("ab"), a);
    // positions 0,1,2 hold codes 1,2,0
    CHECK(t.words()[0] == (uint64_t{1} | (uint64_t{2} << 2)));
    CHECK(t.char_at(0) == 1);
    CHECK(t.char_at(1) == 2);
    CHECK(t.char_at(2) == 0);
}

TEST_CASE("banana codes and bounds") {
    auto a = build_alphabet(bytes_of("banana"));
    auto t = PackedText::pack(bytes_of("banana"), a);
    uint32_t expect[] = {2, 1, 3, 1, 3, 1, 0};
    for (uint64_t i = 0; i <= 6; ++i) CHECK(t.char_at(i) == expect[i]);
    CHECK_THROWS_AS(t.char_at(7), std::out_of_range);

    auto bad = bytes_of("banxna");
    CHECK_THROWS_WITH(PackedText::pack(bad, a), Catch::Matchers::ContainsSubstring("position 3"));
}

TEST_CASE("extract_chunk clamps at the terminator") {
    auto a = build_alphabet(bytes_of("banana"));
    auto t = PackedText::pack(bytes_of("banana"), a);

    auto mid = t.extract_chunk(1, 3);  // "ana"
    CHECK(mid.valid_len == 3);
    CHECK(mid.code(0) == 1);
    CHECK(mid.code(1) == 3);
    CHECK(mid.code(2) == 1);

    auto tail = t.extract_chunk(4, 4);  // "na$" then padding
    CHECK(tail.valid_len == 3);
    CHECK(tail.code(0) == 3);
    CHECK(tail.code(1) == 1);
    CHECK(tail.code(2) == 0);
    CHECK(tail.code(3) == 0);

    auto empty = t.extract_chunk(2, 0);
    CHECK(empty.valid_len == 0);
    CHECK(empty.word == 0);
}

TEST_CASE("first_mismatch and chunk_compare on hand cases") {
    auto a = build_alphabet(bytes_of("ban"));  // sigma 3, 2 bits
    auto mk = [&](std::vector<uint32_t> codes) {
        auto t = PackedText::from_codes(codes, a);
        return t.extract_chunk(0, static_cast<uint32_t>(codes.size()));
    };
    CHECK_FALSE(first_mismatch(mk({1, 3, 1}), mk({1, 3, 1})));
    auto mm = first_mismatch(mk({1, 3, 1}), mk({1, 3, 2}));
    REQUIRE(mm);
    CHECK(*mm == 2);
    CHECK(*first_mismatch(mk({2, 1}), mk({1, 1})) == 0);

    auto c = chunk_compare(mk({1}), mk({1, 3}));  // "a$" < "an"
    CHECK(c.order == Ordering::Less);
    CHECK(c.mismatch == 1);
    CHECK(chunk_compare(mk({1, 3}), mk({1, 3})).order == Ordering::Equal);
    auto g = chunk_compare(mk({3, 1}), mk({2, 1}));
    CHECK(g.order == Ordering::Greater);
    CHECK(g.mismatch == 0);
}

TEST_CASE("round trip over fuzzed alphabets") {
    std::mt19937_64 rng(42);
    for (uint32_t pool : {1u, 2u, 4u, 16u, 64u, 255u}) {
        for (int rep = 0; rep < 4; ++rep) {
            size_t n = 1 + rng() % 10000;
            auto text = tsup::random_text(rng, n, pool);
            auto a = build_alphabet(text);
            auto t = PackedText::pack(text, a);
            REQUIRE(t.size() == n);
            bool ok = t.char_at(n) == 0;
            for (size_t i = 0; i < n; ++i)
                ok = ok && t.char_at(i) == a.code(text[i]);
            CHECK(ok);
        }
    }
}

TEST_CASE("extract_chunk equals per-character assembly on every offset class") {
    std::mt19937_64 rng(43);
    for (uint32_t pool : {2u, 4u, 30u, 255u}) {
        size_t n = 700;
        auto text = tsup::random_text(rng, n, pool);
        auto a = build_alphabet(text);
        auto t = PackedText::pack(text, a);
        for (int rep = 0; rep < 3000; ++rep) {
            uint64_t i = rng() % (n + 1);
            uint32_t len = static_cast<uint32_t>(rng() % (a.alpha + 1));
            auto c = t.extract_chunk(i, len);
            uint64_t avail = n + 1 - i;
            REQUIRE(c.valid_len == std::min<uint64_t>(len, avail));
            bool ok = true;
            for (uint32_t j = 0; j < len; ++j) {
                uint32_t expect = (i + j <= n) ? t.char_at(i + j) : 0;
                ok = ok && c.code(j) == expect;
            }
            CHECK(ok);
        }
    }
}

TEST_CASE("first_mismatch agrees with a linear scan on random chunk pairs") {
    std::mt19937_64 rng(44);
    for (uint32_t pool : {2u, 5u, 200u}) {
        auto sample = tsup::random_text(rng, 64, pool);
        auto a = build_alphabet(sample);
        uint64_t checked = 0;
        for (int rep = 0; rep < 40000; ++rep) {
            uint32_t len = static_cast<uint32_t>(rng() % (a.alpha + 1));
            std::vector<uint32_t> x(len), y(len);
            for (uint32_t j = 0; j < len; ++j) {
                x[j] = static_cast<uint32_t>(rng() % (a.sigma + 1));
                y[j] = (rng() % 3) ? x[j] : static_cast<uint32_t>(rng() % (a.sigma + 1));
            }
            auto ca = PackedText::from_codes(x, a).extract_chunk(0, len);
            auto cb = PackedText::from_codes(y, a).extract_chunk(0, len);
            std::optional<uint32_t> expect;
            for (uint32_t j = 0; j < a.alpha && !expect; ++j) {
                uint32_t xa = j < len ? x[j] : 0, yb = j < len ? y[j] : 0;
                if (xa != yb) expect = j;
            }
            REQUIRE(first_mismatch(ca, cb) == expect);
            // order consistency with decoded sequences
            auto cmp = chunk_compare(ca, cb);
            if (!expect) CHECK(cmp.order == Ordering::Equal);
            else
                CHECK(cmp.order == ((x[*expect] < (*expect < len ? y[*expect] : 0))
                                        ? Ordering::Less
                                        : Ordering::Greater));
            ++checked;
        }
        REQUIRE(checked >= 40000);
    }
}
