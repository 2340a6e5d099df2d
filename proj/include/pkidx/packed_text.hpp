#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pkidx {

// Machine word width. All packing math assumes 64-bit words.
inline constexpr unsigned kWordBits = 64;

// Symbol coding for a byte alphabet. Code 0 is reserved for the terminator $
// and is never assigned to an input byte; input bytes get codes 1..sigma in
// ascending byte order, so code order equals raw lexicographic order.
struct Alphabet {
    std::array<int16_t, 256> code_of;  // -1 when the byte is not in the alphabet
    std::vector<uint8_t> byte_of;      // byte_of[c-1] = raw byte for code c
    uint32_t sigma = 0;                // distinct input symbols
    uint32_t bits = 0;                 // bits per code, ceil(log2(sigma+1))
    uint32_t alpha = 0;                // codes per word, floor(64/bits)
    uint64_t code_mask = 0;

    bool contains(uint8_t b) const { return code_of[b] >= 0; }
    uint32_t code(uint8_t b) const { return static_cast<uint32_t>(code_of[b]); }
};

inline Alphabet build_alphabet(std::span<const uint8_t> raw) {
    if (raw.empty()) throw std::invalid_argument("empty text");
    std::array<bool, 256> seen{};
    for (uint8_t b : raw) seen[b] = true;
    Alphabet a;
    a.code_of.fill(-1);
    for (int b = 0; b < 256; ++b) {
        if (seen[b]) {
            a.byte_of.push_back(static_cast<uint8_t>(b));
            a.code_of[b] = static_cast<int16_t>(a.byte_of.size());
        }
    }
    a.sigma = static_cast<uint32_t>(a.byte_of.size());
    a.bits = static_cast<uint32_t>(std::bit_width(a.sigma));  // ceil(log2(sigma+1))
    if (a.bits > kWordBits) throw std::invalid_argument("alphabet too wide for one word");
    a.alpha = kWordBits / a.bits;
    a.code_mask = (a.bits == kWordBits) ? ~uint64_t{0} : ((uint64_t{1} << a.bits) - 1);
    return a;
}

// Up to alpha codes held in one word, lowest text position in the lowest
// bits. Positions at or past valid_len are code 0 ($ padding); all bits
// beyond valid_len*bits are zero.
struct Chunk {
    uint64_t word = 0;
    uint32_t valid_len = 0;
    uint32_t bits = 0;

    uint32_t code(uint32_t pos) const {
        uint64_t mask = (bits == kWordBits) ? ~uint64_t{0} : ((uint64_t{1} << bits) - 1);
        return static_cast<uint32_t>((word >> (pos * bits)) & mask);
    }
};

// Bit-packed code sequence: n input codes followed by one terminator code 0
// at position n. Little-index-first inside each word: position i lives at
// word i/alpha, bit offset (i%alpha)*bits. Unused high bits are zero.
class PackedText {
public:
    PackedText() = default;

    uint64_t size() const { return n_; }
    uint32_t bits() const { return bits_; }
    uint32_t alpha() const { return alpha_; }
    const std::vector<uint64_t>& words() const { return words_; }

    uint32_t char_at(uint64_t i) const {
        if (i > n_) throw std::out_of_range("char_at: position " + std::to_string(i) +
                                            " past terminator " + std::to_string(n_));
        return static_cast<uint32_t>((words_[i / alpha_] >> ((i % alpha_) * bits_)) & mask_);
    }

    // Codes i..i+len-1 gathered into one word; positions past the terminator
    // contribute code 0. len must be at most alpha.
    Chunk extract_chunk(uint64_t i, uint32_t len) const {
        if (i > n_) throw std::out_of_range("extract_chunk: start past terminator");
        if (len > alpha_) throw std::invalid_argument("extract_chunk: len exceeds alpha");
        uint64_t avail = n_ + 1 - i;
        Chunk c;
        c.bits = bits_;
        c.valid_len = static_cast<uint32_t>(std::min<uint64_t>(len, avail));
        if (len == 0) return c;
        uint64_t wi = i / alpha_;
        uint32_t off = static_cast<uint32_t>(i % alpha_);
        uint64_t lo = word_or_zero(wi) >> (off * bits_);
        uint64_t hi = (off == 0) ? 0 : (word_or_zero(wi + 1) << ((alpha_ - off) * bits_));
        uint64_t w = lo | hi;
        uint32_t keep = std::min<uint32_t>(len, static_cast<uint32_t>(std::min<uint64_t>(avail, alpha_)));
        w &= low_code_mask(keep);
        c.word = w;
        return c;
    }

    static PackedText pack(std::span<const uint8_t> raw, const Alphabet& a) {
        PackedText t;
        t.n_ = raw.size();
        t.bits_ = a.bits;
        t.alpha_ = a.alpha;
        t.mask_ = a.code_mask;
        t.words_.assign((t.n_ + 1 + a.alpha - 1) / a.alpha, 0);
        for (uint64_t i = 0; i < raw.size(); ++i) {
            if (!a.contains(raw[i]))
                throw std::invalid_argument("byte at position " + std::to_string(i) +
                                            " not in alphabet");
            t.words_[i / a.alpha] |= uint64_t{a.code(raw[i])} << ((i % a.alpha) * a.bits);
        }
        // position n_ stays 0: the terminator
        return t;
    }

    static PackedText from_codes(std::span<const uint32_t> codes, const Alphabet& a) {
        PackedText t;
        t.n_ = codes.size();
        t.bits_ = a.bits;
        t.alpha_ = a.alpha;
        t.mask_ = a.code_mask;
        t.words_.assign((t.n_ + 1 + a.alpha - 1) / a.alpha, 0);
        for (uint64_t i = 0; i < codes.size(); ++i)
            t.words_[i / a.alpha] |= uint64_t{codes[i]} << ((i % a.alpha) * a.bits);
        return t;
    }

    uint64_t low_code_mask(uint32_t count) const {
        uint32_t bitcount = count * bits_;
        return bitcount >= kWordBits ? ~uint64_t{0} : ((uint64_t{1} << bitcount) - 1);
    }

    void set_storage(std::vector<uint64_t> words, uint64_t n, const Alphabet& a) {
        words_ = std::move(words);
        n_ = n;
        bits_ = a.bits;
        alpha_ = a.alpha;
        mask_ = a.code_mask;
    }

private:
    uint64_t word_or_zero(uint64_t wi) const { return wi < words_.size() ? words_[wi] : 0; }

    std::vector<uint64_t> words_;
    uint64_t n_ = 0;
    uint32_t bits_ = 0;
    uint32_t alpha_ = 0;
    uint64_t mask_ = 0;
};

// Position of the first differing code between two padded chunks, or nullopt
// when the padded words are equal. One xor and one trailing-zero count: with
// little-index-first packing the lowest set bit belongs to the mismatching
// code with the lowest index.
inline std::optional<uint32_t> first_mismatch(const Chunk& a, const Chunk& b) {
    uint64_t x = a.word ^ b.word;
    if (x == 0) return std::nullopt;
    return static_cast<uint32_t>(std::countr_zero(x)) / a.bits;
}

enum class Ordering { Less, Equal, Greater };

struct ChunkCompare {
    Ordering order;
    uint32_t mismatch = 0;  // meaningful when order != Equal
};

// Lexicographic order of the padded code sequences; code 0 ($) sorts lowest.
inline ChunkCompare chunk_compare(const Chunk& a, const Chunk& b) {
    auto mm = first_mismatch(a, b);
    if (!mm) return {Ordering::Equal, 0};
    uint32_t p = *mm;
    return {a.code(p) < b.code(p) ? Ordering::Less : Ordering::Greater, p};
}

}  // namespace pkidx
