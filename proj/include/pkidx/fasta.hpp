#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pkidx {

// A FASTA record mapped into the concatenated text. Records are joined with
// no separator symbol; boundaries are bookkeeping only.
struct FastaRecord {
    uint64_t start = 0;
    uint64_t len = 0;
    std::string name;
};

struct Corpus {
    std::vector<uint8_t> bytes;
    std::vector<FastaRecord> records;  // empty for raw inputs
};

inline std::vector<uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return std::vector<uint8_t>((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
}

inline Corpus parse_fasta(const std::vector<uint8_t>& data) {
    Corpus c;
    size_t i = 0;
    const size_t n = data.size();
    while (i < n) {
        if (data[i] == '>') {
            size_t eol = i;
            while (eol < n && data[eol] != '\n') ++eol;
            size_t name_end = i + 1;
            while (name_end < eol && !isspace(data[name_end])) ++name_end;
            FastaRecord rec;
            rec.name.assign(data.begin() + i + 1, data.begin() + name_end);
            rec.start = c.bytes.size();
            c.records.push_back(std::move(rec));
            i = eol + 1;
        } else if (data[i] == '\n' || data[i] == '\r') {
            ++i;
        } else {
            if (c.records.empty()) throw std::runtime_error("FASTA input without a header line");
            c.bytes.push_back(data[i]);
            c.records.back().len = c.bytes.size() - c.records.back().start;
            ++i;
        }
    }
    if (c.records.empty()) throw std::runtime_error("FASTA input without records");
    return c;
}

inline Corpus load_corpus(const std::string& path, bool fasta) {
    auto data = read_file_bytes(path);
    if (!fasta) {
        Corpus c;
        c.bytes = std::move(data);
        return c;
    }
    return parse_fasta(data);
}

}  // namespace pkidx
