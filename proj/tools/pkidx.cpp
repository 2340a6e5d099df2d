// pkidx: build, query and inspect deterministic packed-string indexes.
//
// Exit codes: 0 ok, 1 query/data error, 2 usage error.
// Set PKIDX_LOG=1 for diagnostics on stderr.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pkidx/fasta.hpp"
#include "pkidx/naive_index.hpp"
#include "pkidx/query_engine.hpp"
#include "pkidx/serialize.hpp"
#include "pkidx/verify.hpp"

namespace {

bool log_enabled() {
    const char* v = std::getenv("PKIDX_LOG");
    return v != nullptr && *v != '\0' && std::string(v) != "0";
}

void logmsg(const std::string& msg) {
    if (log_enabled()) std::cerr << "pkidx: " << msg << "\n";
}

// Pattern lines may carry \xNN and \\ escapes so binary patterns fit in a
// line-oriented interface.
std::optional<std::vector<uint8_t>> decode_pattern(const std::string& line) {
    std::vector<uint8_t> out;
    for (size_t i = 0; i < line.size();) {
        if (line[i] != '\\') {
            out.push_back(static_cast<uint8_t>(line[i++]));
            continue;
        }
        if (i + 1 < line.size() && line[i + 1] == '\\') {
            out.push_back('\\');
            i += 2;
            continue;
        }
        if (i + 3 < line.size() && line[i + 1] == 'x' && isxdigit(line[i + 2]) &&
            isxdigit(line[i + 3])) {
            out.push_back(static_cast<uint8_t>(std::stoi(line.substr(i + 2, 2), nullptr, 16)));
            i += 4;
            continue;
        }
        return std::nullopt;  // bad escape
    }
    return out;
}

struct RecordTable {
    const std::vector<pkidx::FastaRecord>* records;

    // record containing text position p, by binary search on starts
    const pkidx::FastaRecord* find(uint64_t p) const {
        auto& rs = *records;
        size_t lo = 0, hi = rs.size();
        while (lo + 1 < hi) {
            size_t mid = (lo + hi) / 2;
            if (rs[mid].start <= p) lo = mid;
            else hi = mid;
        }
        return &rs[lo];
    }
};

int cmd_build(const std::string& input, const std::string& output, bool fasta,
              std::optional<uint32_t> force_threshold) {
    pkidx::Corpus corpus = pkidx::load_corpus(input, fasta);
    if (corpus.bytes.empty()) {
        std::cerr << "pkidx: empty text\n";
        return 1;
    }
    pkidx::BuildOptions opts;
    opts.force_threshold = force_threshold;
    auto idx = pkidx::build_index(corpus.bytes, opts);
    pkidx::save_index_file(output, idx, corpus.records);
    logmsg("built index: n=" + std::to_string(idx.n()) +
           " sigma=" + std::to_string(idx.alphabet.sigma) +
           " nodes=" + std::to_string(idx.tree.nodes.size()));
    return 0;
}

int cmd_query(const std::string& index_path, const std::string& mode_name,
              std::vector<std::string> patterns, const std::string& pattern_file,
              bool trace, const std::string& engine, bool sort_positions) {
    auto loaded = pkidx::load_index_file(index_path);
    const auto& idx = loaded.idx;
    pkidx::QueryMode mode;
    if (mode_name == "count") mode = pkidx::QueryMode::Count;
    else if (mode_name == "locate") mode = pkidx::QueryMode::Locate;
    else if (mode_name == "predecessor") mode = pkidx::QueryMode::Predecessor;
    else {
        std::cerr << "pkidx: unknown mode " << mode_name << "\n";
        return 2;
    }

    if (!pattern_file.empty()) {
        std::ifstream f(pattern_file);
        if (!f) {
            std::cerr << "pkidx: cannot open " << pattern_file << "\n";
            return 1;
        }
        std::string line;
        while (std::getline(f, line)) patterns.push_back(line);
    } else if (patterns.empty()) {
        std::string line;
        while (std::getline(std::cin, line)) patterns.push_back(line);
    }

    std::vector<uint8_t> raw_text;
    if (engine == "naive") raw_text = pkidx::decode_text(idx);

    RecordTable rt{&loaded.records};
    bool fasta = !loaded.records.empty();
    bool had_error = false;

    for (size_t id = 0; id < patterns.size(); ++id) {
        auto decoded = decode_pattern(patterns[id]);
        if (!decoded) {
            std::cout << id << "\terror\tbad pattern encoding\n";
            had_error = true;
            continue;
        }
        const auto& pat = *decoded;

        uint64_t cnt = 0;
        std::vector<uint64_t> locs;
        std::optional<uint64_t> pred;
        pkidx::QueryTrace tr;
        if (engine == "naive") {
            cnt = pkidx::naive::naive_count(raw_text, pat);
            locs = pkidx::naive::naive_locate(raw_text, pat);
            pred = pkidx::naive::naive_predecessor(raw_text, pat);
        } else {
            // locate answers double for counting when record filtering applies
            pkidx::QueryMode m = (fasta && mode != pkidx::QueryMode::Predecessor)
                                     ? pkidx::QueryMode::Locate
                                     : mode;
            pkidx::QueryOptions qo{m, false, trace ? &tr : nullptr};
            auto ans = pkidx::query(idx, pat, qo);
            cnt = ans.count;
            locs = std::move(ans.locations);
            pred = ans.pred_pos;
        }
        if (fasta && !pat.empty()) {
            // drop matches that straddle a record boundary
            std::vector<uint64_t> kept;
            for (uint64_t p : locs) {
                const auto* rec = rt.find(p);
                if (p + pat.size() <= rec->start + rec->len) kept.push_back(p);
            }
            locs = std::move(kept);
            cnt = locs.size();
        }
        if (sort_positions) std::sort(locs.begin(), locs.end());

        if (trace && engine != "naive") {
            std::cout << "# pattern " << id << " path="
                      << (tr.out_of_alphabet ? "raw-fallback"
                          : tr.short_path    ? "short"
                          : tr.sa_fallback   ? "sa-only"
                                             : "long")
                      << " micro_steps=" << tr.micro_steps << " matched=" << tr.chars_matched
                      << " light=" << (tr.light_route ? 1 : 0)
                      << " light_pred_queries=" << tr.light_pred_queries
                      << " heavy_pred_queries=" << tr.heavy_pred_queries
                      << " chunk_cmps=" << tr.sa_stats.chunk_comparisons << "\n";
        }
        std::cout << id << "\t" << mode_name << "\t";
        if (mode == pkidx::QueryMode::Count) {
            std::cout << cnt;
        } else if (mode == pkidx::QueryMode::Locate) {
            if (locs.empty()) std::cout << "-";
            bool first = true;
            for (uint64_t p : locs) {
                if (!first) std::cout << ' ';
                first = false;
                if (fasta) {
                    const auto* rec = rt.find(p);
                    std::cout << rec->name << ':' << (p - rec->start);
                } else {
                    std::cout << p;
                }
            }
        } else {
            if (pred) std::cout << *pred;
            else std::cout << "-";
        }
        std::cout << "\n";
    }
    return had_error ? 1 : 0;
}

int cmd_verify(const std::string& index_path, uint64_t samples) {
    auto loaded = pkidx::load_index_file(index_path);
    auto rep = pkidx::verify_index(loaded.idx, samples);
    for (const auto& c : rep.checks) {
        std::cout << (c.pass ? "PASS" : "FAIL") << "\t" << c.name << "\tchecked=" << c.checked;
        if (!c.detail.empty()) std::cout << "\t" << c.detail;
        std::cout << "\n";
    }
    return rep.all_pass() ? 0 : 1;
}

int cmd_stats(const std::string& index_path) {
    auto loaded = pkidx::load_index_file(index_path);
    const auto& idx = loaded.idx;
    uint64_t k1 = 0, k2a = 0, k2b = 0;
    for (const auto& mt : idx.heavy.micro) {
        if (mt.kind == pkidx::MicroKind::Type1) ++k1;
        else if (mt.kind == pkidx::MicroKind::Type2a) ++k2a;
        else ++k2b;
    }
    std::cout << "n\t" << idx.n() << "\n"
              << "sigma\t" << idx.alphabet.sigma << "\n"
              << "bits_per_symbol\t" << idx.alphabet.bits << "\n"
              << "alpha\t" << idx.alphabet.alpha << "\n"
              << "threshold\t" << idx.heavy.threshold << "\n"
              << "tree_nodes\t" << idx.tree.nodes.size() << "\n"
              << "promoted_nodes\t" << idx.tree.nodes.size() - idx.tree.orig_node_count << "\n"
              << "heavy_nodes\t" << idx.heavy.hc.heavy_count << "\n"
              << "heavy_branching\t" << idx.heavy.hc.heavy_branching_count << "\n"
              << "heavy_leaves\t" << idx.heavy.hc.heavy_leaf_count << "\n"
              << "micro_trees\t" << idx.heavy.micro.size() << "\n"
              << "micro_type1\t" << k1 << "\n"
              << "micro_type2a\t" << k2a << "\n"
              << "micro_type2b\t" << k2b << "\n"
              << "short_table_max_len\t" << idx.short_table.max_len << "\n"
              << "short_table_entries\t" << idx.short_table.entries.size() << "\n"
              << "promotions_type1_roots\t" << idx.heavy.ledger.type1_roots << "\n"
              << "promotions_type1_leaves\t" << idx.heavy.ledger.type1_leaves << "\n"
              << "promotions_type2a\t" << idx.heavy.ledger.type2a << "\n"
              << "promotions_type2b\t" << idx.heavy.ledger.type2b << "\n"
              << "fasta_records\t" << loaded.records.size() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic packed-string full-text index"};
    app.require_subcommand(1);

    std::string in_path, out_path, index_path, mode = "count", pattern_file, engine = "indexed";
    std::vector<std::string> patterns;
    bool fasta = false, trace = false, sort_positions = false;
    std::optional<uint32_t> force_threshold;
    uint32_t threshold_arg = 0;
    uint64_t samples = 100;

    auto* build = app.add_subcommand("build", "build an index from a text file");
    build->add_option("input", in_path, "input file")->required();
    build->add_option("-o,--output", out_path, "output index file")->required();
    build->add_flag("--fasta", fasta, "treat input as FASTA records");
    auto* thr = build->add_option("--force-threshold", threshold_arg,
                                  "override the heavy-node leaf cutoff (testing)");

    auto* q = app.add_subcommand("query", "run queries against an index");
    q->add_option("index", index_path, "index file")->required();
    q->add_option("--mode", mode, "count|locate|predecessor")->required();
    q->add_option("patterns", patterns, "patterns (\\xNN escapes allowed)");
    q->add_option("-f,--file", pattern_file, "read patterns from file, one per line");
    q->add_flag("--trace", trace, "print per-query trace lines prefixed with #");
    q->add_option("--engine", engine, "indexed|naive")
        ->check(CLI::IsMember({"indexed", "naive"}));
    q->add_flag("--sort-positions", sort_positions, "sort locate output by text position");

    auto* v = app.add_subcommand("verify", "run structural and differential checks");
    v->add_option("index", index_path, "index file")->required();
    v->add_option("--samples", samples, "samples per sampled suite (0: structural only)");

    auto* s = app.add_subcommand("stats", "print index statistics");
    s->add_option("index", index_path, "index file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (build->parsed()) {
            if (thr->count()) force_threshold = threshold_arg;
            return cmd_build(in_path, out_path, fasta, force_threshold);
        }
        if (q->parsed())
            return cmd_query(index_path, mode, patterns, pattern_file, trace, engine,
                             sort_positions);
        if (v->parsed()) return cmd_verify(index_path, samples);
        if (s->parsed()) return cmd_stats(index_path);
    } catch (const std::exception& e) {
        std::cerr << "pkidx: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
