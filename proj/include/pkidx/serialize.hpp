#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pkidx/fasta.hpp"
#include "pkidx/query_engine.hpp"

namespace pkidx {

// Index file layout: fixed header, then each component as little-endian
// fixed-width integers in construction order. Derived structures (rank,
// RMQ table, leaf links, dictionaries, predecessor structures) are rebuilt
// on load; construction is deterministic so behavior is identical.

inline constexpr char kMagic[6] = {'P', 'K', 'I', 'D', 'X', '1'};
inline constexpr uint16_t kFormatVersion = 1;

namespace detail {

struct ByteWriter {
    std::string buf;
    void u8(uint8_t v) { buf.push_back(static_cast<char>(v)); }
    void u16(uint16_t v) { raw(&v, 2); }
    void u32(uint32_t v) { raw(&v, 4); }
    void u64(uint64_t v) { raw(&v, 8); }
    void i32(int32_t v) { raw(&v, 4); }
    void raw(const void* p, size_t k) {
        buf.append(reinterpret_cast<const char*>(p), k);
    }
};

struct ByteReader {
    const uint8_t* p;
    size_t left;
    void need(size_t k) const {
        if (left < k) throw std::runtime_error("corrupt index file: truncated");
    }
    uint8_t u8() {
        need(1);
        uint8_t v = *p;
        p += 1;
        left -= 1;
        return v;
    }
    uint16_t u16() { uint16_t v; take(&v, 2); return v; }
    uint32_t u32() { uint32_t v; take(&v, 4); return v; }
    uint64_t u64() { uint64_t v; take(&v, 8); return v; }
    int32_t i32() { int32_t v; take(&v, 4); return v; }
    void take(void* out, size_t k) {
        need(k);
        std::memcpy(out, p, k);
        p += k;
        left -= k;
    }
};

static_assert(std::endian::native == std::endian::little,
              "index files are little-endian; big-endian hosts are unsupported");

}  // namespace detail

inline std::string serialize_index(const PackedIndex& idx,
                                   const std::vector<FastaRecord>& records = {}) {
    detail::ByteWriter w;
    w.raw(kMagic, 6);
    w.u16(kFormatVersion);
    w.u32(kWordBits);
    w.u32(idx.alphabet.sigma);
    w.u32(idx.alphabet.bits);
    w.u32(idx.alphabet.alpha);
    w.u64(idx.n());
    w.u64(idx.heavy.threshold);

    for (uint8_t b : idx.alphabet.byte_of) w.u8(b);

    w.u64(idx.text.words().size());
    for (uint64_t word : idx.text.words()) w.u64(word);

    for (int32_t v : idx.sa.sa) w.i32(v);
    for (int32_t v : idx.sa.lcp) w.i32(v);

    w.u64(idx.tree.nodes.size());
    w.u64(static_cast<uint64_t>(idx.tree.orig_node_count));
    for (const auto& nd : idx.tree.nodes) {
        w.i32(nd.parent);
        w.i32(nd.depth);
        w.i32(nd.sa_lo);
        w.i32(nd.sa_hi);
        w.i32(nd.edge_start);
        w.i32(nd.edge_end);
        w.u32(static_cast<uint32_t>(nd.children.size()));
        for (auto& [code, ch] : nd.children) {
            w.u32(code);
            w.i32(ch);
        }
    }

    w.u32(idx.short_table.max_len);
    w.u64(idx.short_table.entries.size());
    for (int32_t e : idx.short_table.entries) w.i32(e);

    const auto& hc = idx.heavy.hc;
    w.u64(hc.heavy_count);
    w.u64(hc.heavy_branching_count);
    w.u64(hc.heavy_leaf_count);
    w.u64(hc.nonbranching_heavy_count);
    w.u64(idx.heavy.ledger.type1_roots);
    w.u64(idx.heavy.ledger.type1_leaves);
    w.u64(idx.heavy.ledger.type2a);
    w.u64(idx.heavy.ledger.type2b);
    w.u64(idx.heavy.micro.size());
    for (const auto& mt : idx.heavy.micro) {
        w.u8(static_cast<uint8_t>(mt.kind));
        w.i32(mt.root);
        w.i32(mt.root_depth);
        w.i32(mt.path_leaf);
        w.i32(mt.skip_target);
        w.i32(mt.skip_depth);
        w.u64(mt.nav_pairs.size());
        for (auto& [k, v] : mt.nav_pairs) {
            w.u64(k);
            w.u32(v);
        }
        w.u64(mt.light_pairs.size());
        for (auto& [k, v] : mt.light_pairs) {
            w.u64(k);
            w.u32(v);
        }
        w.u64(mt.heavy_pairs.size());
        for (auto& [k, v] : mt.heavy_pairs) {
            w.u64(k);
            w.u32(v);
        }
    }

    w.u64(records.size());
    for (const auto& rec : records) {
        w.u64(rec.start);
        w.u64(rec.len);
        w.u32(static_cast<uint32_t>(rec.name.size()));
        w.raw(rec.name.data(), rec.name.size());
    }
    return std::move(w.buf);
}

struct LoadedIndex {
    PackedIndex idx;
    std::vector<FastaRecord> records;
};

inline LoadedIndex deserialize_index(const uint8_t* data, size_t size) {
    detail::ByteReader r{data, size};
    char magic[6];
    r.take(magic, 6);
    if (std::memcmp(magic, kMagic, 6) != 0)
        throw std::runtime_error("not a pkidx index file (bad magic)");
    if (r.u16() != kFormatVersion) throw std::runtime_error("unsupported index format version");
    if (r.u32() != kWordBits)
        throw std::runtime_error("index built for a different machine word width");

    LoadedIndex out;
    PackedIndex& idx = out.idx;
    uint32_t sigma = r.u32();
    uint32_t bits = r.u32();
    uint32_t alpha = r.u32();
    uint64_t n = r.u64();
    uint64_t threshold = r.u64();

    Alphabet& a = idx.alphabet;
    a.code_of.fill(-1);
    a.sigma = sigma;
    a.bits = bits;
    a.alpha = alpha;
    a.code_mask = (bits == kWordBits) ? ~uint64_t{0} : ((uint64_t{1} << bits) - 1);
    a.byte_of.resize(sigma);
    for (uint32_t c = 0; c < sigma; ++c) {
        a.byte_of[c] = r.u8();
        a.code_of[a.byte_of[c]] = static_cast<int16_t>(c + 1);
    }

    uint64_t word_count = r.u64();
    if (word_count != (n + 1 + alpha - 1) / alpha)
        throw std::runtime_error("corrupt index file: word count mismatch");
    std::vector<uint64_t> words(word_count);
    for (auto& word : words) word = r.u64();
    idx.text.set_storage(std::move(words), n, a);

    idx.sa.sa.resize(n);
    for (auto& v : idx.sa.sa) v = r.i32();
    idx.sa.lcp.resize(n);
    for (auto& v : idx.sa.lcp) v = r.i32();
    idx.sa.rank.assign(n, 0);
    for (uint64_t i = 0; i < n; ++i) {
        if (idx.sa.sa[i] < 0 || idx.sa.sa[i] >= static_cast<int64_t>(n))
            throw std::runtime_error("corrupt index file: sa entry out of range");
        idx.sa.rank[idx.sa.sa[i]] = static_cast<int32_t>(i);
    }
    if (n > 0) {
        uint32_t levels = std::bit_width(n);
        idx.sa.rmq.resize(levels);
        idx.sa.rmq[0] = idx.sa.lcp;
        for (uint32_t k = 1; k < levels; ++k) {
            int64_t len = int64_t{1} << k;
            idx.sa.rmq[k].resize(n - len + 1);
            for (int64_t i = 0; i + len <= static_cast<int64_t>(n); ++i)
                idx.sa.rmq[k][i] = std::min(idx.sa.rmq[k - 1][i], idx.sa.rmq[k - 1][i + len / 2]);
        }
    }

    uint64_t node_count = r.u64();
    idx.tree.orig_node_count = static_cast<int64_t>(r.u64());
    idx.tree.nodes.resize(node_count);
    for (auto& nd : idx.tree.nodes) {
        nd.parent = r.i32();
        nd.depth = r.i32();
        nd.sa_lo = r.i32();
        nd.sa_hi = r.i32();
        nd.edge_start = r.i32();
        nd.edge_end = r.i32();
        uint32_t kids = r.u32();
        nd.children.resize(kids);
        for (auto& [code, ch] : nd.children) {
            code = r.u32();
            ch = r.i32();
        }
    }
    idx.tree.leaf_of_sa.assign(n, -1);
    for (size_t v = 0; v < idx.tree.nodes.size(); ++v) {
        const auto& nd = idx.tree.nodes[v];
        if (nd.children.empty()) {
            if (nd.sa_hi - nd.sa_lo != 1 || nd.sa_lo < 0 || nd.sa_lo >= static_cast<int64_t>(n))
                throw std::runtime_error("corrupt index file: bad leaf range");
            idx.tree.leaf_of_sa[nd.sa_lo] = static_cast<int32_t>(v);
        }
    }

    idx.short_table.sigma = sigma;
    idx.short_table.max_len = r.u32();
    idx.short_table.offsets.assign(idx.short_table.max_len + 1, 0);
    {
        uint64_t off = 0, powl = sigma;
        for (uint32_t len = 1; len <= idx.short_table.max_len; ++len) {
            idx.short_table.offsets[len] = off;
            off += powl;
            powl *= sigma;
        }
    }
    idx.short_table.entries.resize(r.u64());
    for (auto& e : idx.short_table.entries) e = r.i32();

    idx.heavy.threshold = static_cast<uint32_t>(threshold);
    auto& hc = idx.heavy.hc;
    hc = classify_heavy(idx.tree, idx.heavy.threshold);
    hc.heavy_count = r.u64();
    hc.heavy_branching_count = r.u64();
    hc.heavy_leaf_count = r.u64();
    hc.nonbranching_heavy_count = r.u64();
    idx.heavy.ledger.type1_roots = r.u64();
    idx.heavy.ledger.type1_leaves = r.u64();
    idx.heavy.ledger.type2a = r.u64();
    idx.heavy.ledger.type2b = r.u64();
    idx.heavy.micro.resize(r.u64());
    idx.heavy.micro_of_root.assign(idx.tree.nodes.size(), -1);
    for (size_t mi = 0; mi < idx.heavy.micro.size(); ++mi) {
        auto& mt = idx.heavy.micro[mi];
        mt.kind = static_cast<MicroKind>(r.u8());
        mt.root = r.i32();
        mt.root_depth = r.i32();
        mt.path_leaf = r.i32();
        mt.skip_target = r.i32();
        mt.skip_depth = r.i32();
        mt.nav_pairs.resize(r.u64());
        for (auto& [k, v] : mt.nav_pairs) {
            k = r.u64();
            v = r.u32();
        }
        mt.light_pairs.resize(r.u64());
        for (auto& [k, v] : mt.light_pairs) {
            k = r.u64();
            v = r.u32();
        }
        mt.heavy_pairs.resize(r.u64());
        for (auto& [k, v] : mt.heavy_pairs) {
            k = r.u64();
            v = r.u32();
        }
        mt.rebuild_structures();
        if (mt.root < 0 || mt.root >= static_cast<int64_t>(idx.tree.nodes.size()))
            throw std::runtime_error("corrupt index file: micro root out of range");
        idx.heavy.micro_of_root[mt.root] = static_cast<int32_t>(mi);
    }

    out.records.resize(r.u64());
    for (auto& rec : out.records) {
        rec.start = r.u64();
        rec.len = r.u64();
        rec.name.resize(r.u32());
        r.take(rec.name.data(), rec.name.size());
    }
    if (r.left != 0) throw std::runtime_error("corrupt index file: trailing bytes");
    return out;
}

inline void save_index_file(const std::string& path, const PackedIndex& idx,
                            const std::vector<FastaRecord>& records = {}) {
    std::string buf = serialize_index(idx, records);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline LoadedIndex load_index_file(const std::string& path) {
    auto data = read_file_bytes(path);
    return deserialize_index(data.data(), data.size());
}

}  // namespace pkidx
