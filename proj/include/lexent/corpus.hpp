#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lexent/errors.hpp"

namespace lexent {

// A text as a sequence of word ids plus its vocabulary and per-word counts.
struct TokenizedText {
    std::vector<std::uint32_t> tokens;
    std::vector<std::string> vocab;                        // id -> word
    std::unordered_map<std::string, std::uint32_t> ids;   // word -> id
    std::vector<std::uint64_t> counts;                     // id -> occurrences
    std::string source_id;

    std::uint64_t size() const { return tokens.size(); }
    std::uint32_t vocab_size() const { return static_cast<std::uint32_t>(vocab.size()); }

    const std::string& word(std::uint32_t id) const { return vocab[id]; }

    std::uint32_t intern(const std::string& w) {
        auto it = ids.find(w);
        if (it != ids.end()) return it->second;
        auto id = static_cast<std::uint32_t>(vocab.size());
        ids.emplace(w, id);
        vocab.push_back(w);
        counts.push_back(0);
        return id;
    }
};

// Tokenization rules. Defaults: maximal runs of letters, one apostrophe or
// hyphen allowed at a time when flanked by letters on both sides, full
// lowercase folding, digits and everything else are separators.
struct TokenRules {
    bool keep_apostrophe = true;
    bool keep_hyphen = true;
};

namespace detail {

// Decodes UTF-8; on invalid bytes falls back to Latin-1 for that byte, so
// legacy Gutenberg files pass through deterministically.
inline std::vector<char32_t> decode_utf8_lenient(std::string_view bytes) {
    std::vector<char32_t> out;
    out.reserve(bytes.size());
    std::size_t i = 0;
    const std::size_t n = bytes.size();
    while (i < n) {
        const unsigned char c = static_cast<unsigned char>(bytes[i]);
        if (c < 0x80) { out.push_back(c); ++i; continue; }
        int len = 0;
        char32_t cp = 0;
        if ((c & 0xE0) == 0xC0) { len = 2; cp = c & 0x1F; }
        else if ((c & 0xF0) == 0xE0) { len = 3; cp = c & 0x0F; }
        else if ((c & 0xF8) == 0xF0) { len = 4; cp = c & 0x07; }
        if (len == 0 || i + len > n) { out.push_back(c); ++i; continue; }
        bool ok = true;
        char32_t acc = cp;
        for (int k = 1; k < len; ++k) {
            const unsigned char cc = static_cast<unsigned char>(bytes[i + k]);
            if ((cc & 0xC0) != 0x80) { ok = false; break; }
            acc = (acc << 6) | (cc & 0x3F);
        }
        if (!ok || acc > 0x10FFFF) { out.push_back(c); ++i; continue; }
        out.push_back(acc);
        i += len;
    }
    return out;
}

inline void encode_utf8(char32_t cp, std::string& out) {
    if (cp < 0x80) out.push_back(static_cast<char>(cp));
    else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

inline bool is_letter(char32_t cp) {
    if (cp < 0x80)
        return (cp >= 'A' && cp <= 'Z') || (cp >= 'a' && cp <= 'z');
    if (cp == 0xD7 || cp == 0xF7) return false;        // multiply / divide signs
    if (cp >= 0xC0 && cp <= 0x24F) return true;        // Latin-1 suppl., Ext-A/B
    if (cp >= 0x370 && cp <= 0x3FF)                    // Greek
        return cp != 0x374 && cp != 0x375 && cp != 0x37E && cp != 0x387;
    if (cp >= 0x400 && cp <= 0x4FF) return true;       // Cyrillic
    if (cp < 0x500) return false;
    // Above the well-known ranges: accept anything that is not an obvious
    // punctuation/symbol block. Scripts we do not special-case tokenize as
    // letter runs, which is the documented behaviour.
    if (cp >= 0x2000 && cp <= 0x2BFF) return false;    // punctuation, symbols, arrows
    if (cp >= 0x3000 && cp <= 0x303F) return false;    // CJK punctuation
    if (cp >= 0xFE00 && cp <= 0xFFFF) return false;
    return true;
}

inline char32_t fold_lower(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 32;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;   // Latin-1
    if (cp >= 0x100 && cp <= 0x137) return (cp % 2 == 0) ? cp + 1 : cp;
    if (cp >= 0x139 && cp <= 0x148) return (cp % 2 == 1) ? cp + 1 : cp;
    if (cp >= 0x14A && cp <= 0x177) return (cp % 2 == 0) ? cp + 1 : cp;
    if (cp == 0x178) return 0xFF;                                  // Y with diaeresis
    if (cp >= 0x179 && cp <= 0x17E) return (cp % 2 == 1) ? cp + 1 : cp;
    if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 32; // Greek
    if (cp >= 0x410 && cp <= 0x42F) return cp + 32;                // Cyrillic
    if (cp >= 0x400 && cp <= 0x40F) return cp + 80;
    return cp;
}

inline bool is_apostrophe(char32_t cp) { return cp == 0x27 || cp == 0x2019; }

} // namespace detail

// Splits raw text into lowercase word tokens. A single apostrophe or hyphen
// is kept when the characters on both sides are letters; doubled ones (em
// dashes written as "--") split. U+2019 is normalised to '\''.
inline TokenizedText tokenize(std::string_view raw, const TokenRules& rules = {},
                              std::string source_id = {}) {
    const auto cps = detail::decode_utf8_lenient(raw);
    TokenizedText text;
    text.source_id = std::move(source_id);
    std::string cur;
    auto flush = [&] {
        if (cur.empty()) return;
        const std::uint32_t id = text.intern(cur);
        text.tokens.push_back(id);
        text.counts[id]++;
        cur.clear();
    };
    const std::size_t n = cps.size();
    for (std::size_t i = 0; i < n; ++i) {
        const char32_t cp = cps[i];
        if (detail::is_letter(cp)) {
            detail::encode_utf8(detail::fold_lower(cp), cur);
            continue;
        }
        const bool apos = rules.keep_apostrophe && detail::is_apostrophe(cp);
        const bool hyph = rules.keep_hyphen && cp == '-';
        if ((apos || hyph) && !cur.empty() && i + 1 < n && detail::is_letter(cps[i + 1])) {
            cur.push_back(apos ? '\'' : '-');
            continue;
        }
        flush();
    }
    flush();
    if (text.tokens.empty())
        throw input_error("tokenize: document '" + text.source_id + "' is empty after tokenization");
    return text;
}

// Removes the Project Gutenberg header/footer when both "*** START OF" and
// "*** END OF" marker lines are present (in that order); otherwise returns
// the input unchanged. No partial stripping.
inline std::string strip_boilerplate(const std::string& raw) {
    auto find_marker = [&](const char* a, const char* b, std::size_t from) {
        std::size_t p = raw.find(a, from);
        std::size_t q = raw.find(b, from);
        if (p == std::string::npos) return q;
        if (q == std::string::npos) return p;
        return std::min(p, q);
    };
    const std::size_t start = find_marker("*** START OF", "***START OF", 0);
    if (start == std::string::npos) return raw;
    const std::size_t end = find_marker("*** END OF", "***END OF", start + 1);
    if (end == std::string::npos) return raw;
    const std::size_t body_begin = raw.find('\n', start);
    if (body_begin == std::string::npos || body_begin + 1 >= end) return raw;
    std::size_t body_end = raw.rfind('\n', end);
    if (body_end == std::string::npos || body_end <= body_begin) return raw;
    return raw.substr(body_begin + 1, body_end - body_begin - 1);
}

// Entropy analyses assume book-length inputs; shorter texts are analysed
// anyway but carry a warning. See OrderAnalysis::short_text.
inline constexpr std::uint64_t kMinTokensGate = 10000;

struct ManifestEntry {
    std::string path;      // resolved (absolute or manifest-relative)
    std::string language;
    std::string family;
    std::string doc_id;
};

struct CorpusManifest {
    std::vector<ManifestEntry> entries;

    const ManifestEntry* find(const std::string& doc_id) const {
        for (const auto& e : entries)
            if (e.doc_id == doc_id) return &e;
        return nullptr;
    }
};

// Loads a manifest CSV with header `path,language,family,doc_id`. Paths are
// resolved relative to the manifest's directory and must exist.
inline CorpusManifest load_manifest(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw input_error("manifest: cannot open " + manifest_path);
    const auto base = std::filesystem::path(manifest_path).parent_path();

    CorpusManifest m;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, ',')) cols.push_back(col);
        if (ss.eof() && !line.empty() && line.back() == ',') cols.push_back("");
        if (lineno == 1) {
            if (cols.size() != 4 || cols[0] != "path" || cols[1] != "language" ||
                cols[2] != "family" || cols[3] != "doc_id")
                throw input_error("manifest: bad header at row 1 (want path,language,family,doc_id)");
            continue;
        }
        if (cols.size() != 4)
            throw input_error("manifest: malformed row " + std::to_string(lineno) +
                              " (" + std::to_string(cols.size()) + " fields)");
        ManifestEntry e{cols[0], cols[1], cols[2], cols[3]};
        if (e.doc_id.empty())
            throw input_error("manifest: empty doc_id at row " + std::to_string(lineno));
        if (!seen.insert(e.doc_id).second)
            throw input_error("manifest: duplicate doc_id '" + e.doc_id + "' at row " +
                              std::to_string(lineno));
        std::filesystem::path p(e.path);
        if (p.is_relative()) p = base / p;
        e.path = p.string();
        if (!std::filesystem::exists(p))
            throw input_error("manifest: missing file " + e.path + " (row " +
                              std::to_string(lineno) + ")");
        m.entries.push_back(std::move(e));
    }
    if (m.entries.empty()) throw input_error("manifest: no entries in " + manifest_path);
    return m;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Convenience: read, strip boilerplate, tokenize.
inline TokenizedText load_text(const std::string& path, std::string doc_id = {},
                               const TokenRules& rules = {}) {
    if (doc_id.empty()) doc_id = std::filesystem::path(path).stem().string();
    return tokenize(strip_boilerplate(read_file(path)), rules, std::move(doc_id));
}

} // namespace lexent
