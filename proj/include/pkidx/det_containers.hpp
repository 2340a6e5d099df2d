#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace pkidx {

inline constexpr uint32_t kKeyBits = 64;

namespace detail {

// Deterministic multiplier sequence for the hash searches (splitmix64 walk).
inline uint64_t nth_odd_multiplier(uint64_t i) {
    uint64_t z = i + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z = z ^ (z >> 31);
    return z | 1;
}

inline uint32_t mult_shift(uint64_t key, uint64_t mul, uint32_t log_size) {
    return log_size == 0 ? 0 : static_cast<uint32_t>((key * mul) >> (64 - log_size));
}

}  // namespace detail

// Static dictionary from word keys to payloads. Two-level perfect hashing:
// a multiply-shift top table whose multiplier is found by deterministic
// search, then a collision-free multiply-shift table per bucket. Lookups are
// two multiplies, two shifts and one key comparison.
class DetDictionary {
public:
    DetDictionary() = default;

    static DetDictionary build(std::vector<std::pair<uint64_t, uint32_t>> pairs) {
        DetDictionary d;
        d.count_ = pairs.size();
        if (pairs.empty()) return d;
        {
            auto sorted = pairs;
            std::sort(sorted.begin(), sorted.end());
            for (size_t i = 1; i < sorted.size(); ++i)
                if (sorted[i].first == sorted[i - 1].first)
                    throw std::invalid_argument("DetDictionary: duplicate key");
        }

        const size_t k = pairs.size();
        d.top_log_ = std::max<uint32_t>(1, std::bit_width(k) - (std::has_single_bit(k) ? 1 : 0));
        // find a top multiplier keeping sum of squared bucket sizes linear
        std::vector<uint32_t> bucket_of(k);
        std::vector<uint32_t> sizes;
        while (true) {
            bool found = false;
            for (uint64_t trial = 0; trial < 64; ++trial) {
                uint64_t mul = detail::nth_odd_multiplier(trial);
                sizes.assign(size_t{1} << d.top_log_, 0);
                uint64_t sq = 0;
                for (size_t i = 0; i < k; ++i) {
                    uint32_t b = detail::mult_shift(pairs[i].first, mul, d.top_log_);
                    bucket_of[i] = b;
                    sq += 2 * sizes[b] + 1;  // running sum of size^2
                    ++sizes[b];
                }
                if (sq <= 4 * k) {
                    d.top_mul_ = mul;
                    found = true;
                    break;
                }
            }
            if (found) break;
            ++d.top_log_;  // widen and retry
        }

        const size_t nbuckets = size_t{1} << d.top_log_;
        std::vector<std::vector<std::pair<uint64_t, uint32_t>>> buckets(nbuckets);
        for (size_t i = 0; i < k; ++i) buckets[bucket_of[i]].push_back(pairs[i]);

        d.bucket_params_.assign(nbuckets, {0, 0, 0});
        uint64_t total = 0;
        for (size_t b = 0; b < nbuckets; ++b) {
            size_t s = buckets[b].size();
            if (s == 0) continue;
            uint32_t lg = s == 1 ? 0 : std::bit_width(2 * s * s - 1);
            d.bucket_params_[b].offset = total;
            total += uint64_t{1} << lg;
            d.bucket_params_[b].log_size = lg;
        }
        d.slots_.assign(total, {kEmptyKey, 0});
        for (size_t b = 0; b < nbuckets; ++b) {
            auto& bucket = buckets[b];
            if (bucket.empty()) continue;
            auto& bp = d.bucket_params_[b];
            for (uint64_t trial = 0;; ++trial) {
                if (trial == 4096) {  // widen the bucket table and restart the search
                    uint64_t grown = uint64_t{1} << ++bp.log_size;
                    d.slots_.resize(d.slots_.size() + grown, {kEmptyKey, 0});
                    bp.offset = d.slots_.size() - grown;
                    trial = 0;
                }
                uint64_t mul = detail::nth_odd_multiplier(trial);
                bool ok = true;
                for (auto& [key, val] : bucket) {
                    auto& slot = d.slots_[bp.offset + detail::mult_shift(key, mul, bp.log_size)];
                    if (slot.first != kEmptyKey) {
                        ok = false;
                        break;
                    }
                    slot = {key, val};
                }
                if (ok) {
                    bp.mul = mul;
                    break;
                }
                for (uint64_t j = 0; j < (uint64_t{1} << bp.log_size); ++j)
                    d.slots_[bp.offset + j] = {kEmptyKey, 0};
            }
        }
        // kEmptyKey may be a real key; give it a dedicated slot
        for (auto& [key, val] : pairs)
            if (key == kEmptyKey) {
                d.has_empty_key_ = true;
                d.empty_key_val_ = val;
            }
        return d;
    }

    std::optional<uint32_t> lookup(uint64_t key) const {
        if (count_ == 0) return std::nullopt;
        if (key == kEmptyKey)
            return has_empty_key_ ? std::optional<uint32_t>(empty_key_val_) : std::nullopt;
        const auto& bp = bucket_params_[detail::mult_shift(key, top_mul_, top_log_)];
        const auto& slot = slots_[bp.offset + detail::mult_shift(key, bp.mul, bp.log_size)];
        if (slot.first == key) return slot.second;
        return std::nullopt;
    }

    size_t size() const { return count_; }

private:
    static constexpr uint64_t kEmptyKey = ~uint64_t{0};

    struct BucketParams {
        uint64_t mul;
        uint64_t offset;
        uint32_t log_size;
    };

    std::vector<std::pair<uint64_t, uint32_t>> slots_;
    std::vector<BucketParams> bucket_params_;
    uint64_t top_mul_ = 0;
    uint32_t top_log_ = 0;
    size_t count_ = 0;
    bool has_empty_key_ = false;
    uint32_t empty_key_val_ = 0;
};

// Static predecessor/successor structure over word keys. Keys are grouped
// into sorted buckets of up to 64; bucket minima feed a bit trie over the
// 64 prefix levels, stored as one dictionary per level, so locating the
// right bucket is a binary search over levels (log w dictionary probes)
// followed by a binary search inside one small bucket.
class DetPredecessor {
public:
    DetPredecessor() = default;

    static DetPredecessor build(std::vector<std::pair<uint64_t, uint32_t>> pairs) {
        DetPredecessor p;
        std::sort(pairs.begin(), pairs.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (size_t i = 1; i < pairs.size(); ++i)
            if (pairs[i].first == pairs[i - 1].first)
                throw std::invalid_argument("DetPredecessor: duplicate key");
        p.keys_.reserve(pairs.size());
        p.payloads_.reserve(pairs.size());
        for (auto& [k, v] : pairs) {
            p.keys_.push_back(k);
            p.payloads_.push_back(v);
        }
        if (p.keys_.empty()) return p;

        const size_t nreps = (p.keys_.size() + kBucketSize - 1) / kBucketSize;
        p.rep_nodes_.clear();
        std::vector<std::vector<std::pair<uint64_t, uint32_t>>> level_pairs(kKeyBits + 1);
        for (size_t r = 0; r < nreps; ++r) {
            uint64_t rep = p.keys_[r * kBucketSize];
            for (uint32_t lvl = 0; lvl <= kKeyBits; ++lvl) {
                uint64_t prefix = lvl == 0 ? 0 : rep >> (kKeyBits - lvl);
                auto& lp = level_pairs[lvl];
                if (!lp.empty() && lp.back().first == prefix) {
                    p.rep_nodes_[lp.back().second].max_rep = static_cast<uint32_t>(r);
                } else {
                    lp.emplace_back(prefix, static_cast<uint32_t>(p.rep_nodes_.size()));
                    p.rep_nodes_.push_back({static_cast<uint32_t>(r), static_cast<uint32_t>(r)});
                }
            }
        }
        p.levels_.resize(kKeyBits + 1);
        for (uint32_t lvl = 0; lvl <= kKeyBits; ++lvl)
            p.levels_[lvl] = DetDictionary::build(std::move(level_pairs[lvl]));
        return p;
    }

    // largest (key, payload) with key <= q
    std::optional<std::pair<uint64_t, uint32_t>> predecessor(uint64_t q) const {
        if (keys_.empty()) return std::nullopt;
        auto bucket = rep_predecessor(q);
        if (!bucket) return std::nullopt;
        size_t lo = *bucket * kBucketSize;
        size_t hi = std::min(lo + kBucketSize, keys_.size());
        // keys_[lo] <= q; find the last key <= q in the bucket
        size_t idx = static_cast<size_t>(
                         std::upper_bound(keys_.begin() + lo, keys_.begin() + hi, q) -
                         keys_.begin()) - 1;
        return std::make_pair(keys_[idx], payloads_[idx]);
    }

    // smallest (key, payload) with key > q
    std::optional<std::pair<uint64_t, uint32_t>> successor(uint64_t q) const {
        if (keys_.empty()) return std::nullopt;
        auto bucket = rep_predecessor(q);
        size_t from = bucket ? *bucket * kBucketSize : 0;
        size_t hi = std::min(from + kBucketSize, keys_.size());
        size_t idx = static_cast<size_t>(
            std::upper_bound(keys_.begin() + from, keys_.begin() + hi, q) - keys_.begin());
        if (idx == keys_.size()) return std::nullopt;
        return std::make_pair(keys_[idx], payloads_[idx]);
    }

    size_t size() const { return keys_.size(); }
    const std::vector<uint64_t>& keys() const { return keys_; }
    const std::vector<uint32_t>& payloads() const { return payloads_; }

private:
    static constexpr size_t kBucketSize = 64;

    struct RepNode {
        uint32_t min_rep;
        uint32_t max_rep;
    };

    std::optional<uint32_t> level_node(uint32_t lvl, uint64_t q) const {
        return levels_[lvl].lookup(lvl == 0 ? 0 : q >> (kKeyBits - lvl));
    }

    // index of the bucket whose minimum is the largest one <= q
    std::optional<uint32_t> rep_predecessor(uint64_t q) const {
        // deepest level whose prefix of q is present (level 0 always is)
        uint32_t lo = 0, hi = kKeyBits;
        while (lo < hi) {
            uint32_t mid = (lo + hi + 1) / 2;
            if (level_node(mid, q)) lo = mid;
            else hi = mid - 1;
        }
        uint32_t node = *level_node(lo, q);
        if (lo == kKeyBits) return rep_nodes_[node].min_rep;  // q is a bucket minimum
        bool next_bit = (q >> (kKeyBits - 1 - lo)) & 1;
        if (next_bit) {
            // left child exists and holds the predecessor's subtree maximum
            uint64_t left_prefix = (q >> (kKeyBits - 1 - lo)) & ~uint64_t{1};
            auto left = levels_[lo + 1].lookup(left_prefix);
            return rep_nodes_[*left].max_rep;
        }
        // everything under this node is > q; step left of its minimum
        uint32_t min_rep = rep_nodes_[node].min_rep;
        if (min_rep == 0) return std::nullopt;
        return min_rep - 1;
    }

    std::vector<uint64_t> keys_;
    std::vector<uint32_t> payloads_;
    std::vector<DetDictionary> levels_;
    std::vector<RepNode> rep_nodes_;
};

}  // namespace pkidx
