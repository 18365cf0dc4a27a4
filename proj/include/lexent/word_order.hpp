#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lexent/corpus.hpp"
#include "lexent/entropy.hpp"
#include "lexent/errors.hpp"
#include "lexent/rng.hpp"

namespace lexent {

// H_s = (1/N) log2( N! / prod_j n_j! ), evaluated through lgamma so that
// factorials are never materialised.
inline double boltzmann_entropy(const std::vector<std::uint64_t>& counts, std::uint64_t n_total) {
    std::uint64_t sum = 0;
    double log_omega = std::lgamma(static_cast<double>(n_total) + 1.0);
    for (const std::uint64_t c : counts) {
        if (c == 0) throw compute_error("boltzmann_entropy: zero count in vocabulary");
        sum += c;
        log_omega -= std::lgamma(static_cast<double>(c) + 1.0);
    }
    if (sum != n_total || n_total == 0)
        throw compute_error("boltzmann_entropy: counts do not sum to N");
    return log_omega / (std::log(2.0) * static_cast<double>(n_total));
}

inline double boltzmann_entropy(const TokenizedText& text) {
    return boltzmann_entropy(text.counts, text.size());
}

// Plug-in unigram entropy -sum (n/N) log2(n/N); upper bound of H_s.
inline double unigram_plugin_entropy(const TokenizedText& text) {
    const double n = static_cast<double>(text.size());
    double h = 0.0;
    for (const std::uint64_t c : text.counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return h;
}

// Uniform random permutation of token positions (Fisher-Yates, seeded).
inline TokenizedText shuffle_text(const TokenizedText& text, std::uint64_t seed) {
    TokenizedText out = text;
    Rng rng(seed);
    rng.shuffle(out.tokens);
    return out;
}

// N iid draws from the empirical distribution {n_w / N}. Drawing a uniform
// position of the original stream is exactly that distribution.
inline TokenizedText frequency_sample_text(const TokenizedText& text, std::uint64_t seed) {
    TokenizedText out;
    out.vocab = text.vocab;
    out.ids = text.ids;
    out.source_id = text.source_id;
    out.counts.assign(text.counts.size(), 0);
    const std::uint64_t n = text.size();
    out.tokens.resize(n);
    Rng rng(seed);
    for (std::uint64_t i = 0; i < n; ++i) {
        const std::uint32_t w = text.tokens[static_cast<std::size_t>(rng.below(n))];
        out.tokens[i] = w;
        out.counts[w]++;
    }
    return out;
}

enum class RandomizationMode { shuffle, frequency_sample };

inline const char* mode_name(RandomizationMode m) {
    return m == RandomizationMode::shuffle ? "shuffle" : "frequency_sample";
}

struct OrderAnalysis {
    std::string doc_id;
    std::uint64_t n_tokens = 0;
    std::uint32_t vocab_size = 0;
    EntropyEstimate h;                          // original text
    double hs_exact = 0.0;                      // Boltzmann value
    std::optional<EntropyEstimate> hs_empirical; // estimator on a randomised realisation
    double ds = 0.0;                            // hs_used - h
    RandomizationMode mode = RandomizationMode::shuffle;
    std::uint64_t seed = kDefaultSeed;
    bool ds_from_empirical = false;
    bool short_text = false;                    // below the length gate
};

struct AnalyzeOptions {
    RandomizationMode mode = RandomizationMode::shuffle;
    std::uint64_t seed = kDefaultSeed;
    bool estimate_empirical = true;   // run the estimator on the randomised text
    bool ds_from_empirical = false;   // default D_s uses the exact H_s
    std::uint64_t min_tokens = kMinTokensGate;
};

inline OrderAnalysis analyze_order(const TokenizedText& text, const AnalyzeOptions& opt = {}) {
    OrderAnalysis a;
    a.doc_id = text.source_id;
    a.n_tokens = text.size();
    a.vocab_size = text.vocab_size();
    a.mode = opt.mode;
    a.seed = opt.seed;
    a.short_text = text.size() < opt.min_tokens;
    a.h = entropy_match_length(text);
    a.hs_exact = boltzmann_entropy(text);
    if (opt.estimate_empirical) {
        const TokenizedText randomized = opt.mode == RandomizationMode::shuffle
                                             ? shuffle_text(text, opt.seed)
                                             : frequency_sample_text(text, opt.seed);
        a.hs_empirical = entropy_match_length(randomized);
    }
    a.ds_from_empirical = opt.ds_from_empirical && a.hs_empirical.has_value();
    const double hs_used = a.ds_from_empirical ? a.hs_empirical->bits_per_word : a.hs_exact;
    a.ds = hs_used - a.h.bits_per_word;
    return a;
}

struct FamilySummary {
    std::string family;
    std::size_t languages = 0;  // distinct language tags
    std::size_t texts = 0;
    double mean_hs = 0, mean_h = 0, mean_ds = 0;
    double sd_hs = 0, sd_h = 0, sd_ds = 0;
    double rv_hs = 0, rv_h = 0, rv_ds = 0; // relative variability sd/mean
};

namespace detail {

struct MeanSd { double mean = 0, sd = 0; };

inline MeanSd mean_sd(const std::vector<double>& v) {
    MeanSd r;
    if (v.empty()) return r;
    for (const double x : v) r.mean += x;
    r.mean /= static_cast<double>(v.size());
    double s2 = 0;
    for (const double x : v) s2 += (x - r.mean) * (x - r.mean);
    r.sd = std::sqrt(s2 / static_cast<double>(v.size())); // population SD
    return r;
}

} // namespace detail

// Groups analyses by manifest family. Every analysis doc_id must be present
// in the manifest. Output order: families sorted by tag.
inline std::vector<FamilySummary> summarize_corpus(const std::vector<OrderAnalysis>& analyses,
                                                   const CorpusManifest& manifest) {
    if (analyses.empty()) throw compute_error("summarize_corpus: no analyses");
    struct Group {
        std::vector<double> hs, h, ds;
        std::vector<std::string> langs;
    };
    std::map<std::string, Group> groups;
    for (const auto& a : analyses) {
        const ManifestEntry* e = manifest.find(a.doc_id);
        if (!e) throw compute_error("summarize_corpus: doc_id '" + a.doc_id + "' not in manifest");
        auto& g = groups[e->family];
        g.hs.push_back(a.hs_exact);
        g.h.push_back(a.h.bits_per_word);
        g.ds.push_back(a.ds);
        g.langs.push_back(e->language);
    }
    std::vector<FamilySummary> out;
    for (auto& [family, g] : groups) {
        FamilySummary s;
        s.family = family;
        s.texts = g.hs.size();
        std::sort(g.langs.begin(), g.langs.end());
        s.languages = static_cast<std::size_t>(
            std::unique(g.langs.begin(), g.langs.end()) - g.langs.begin());
        const auto hs = detail::mean_sd(g.hs), h = detail::mean_sd(g.h), ds = detail::mean_sd(g.ds);
        s.mean_hs = hs.mean; s.sd_hs = hs.sd;
        s.mean_h = h.mean;   s.sd_h = h.sd;
        s.mean_ds = ds.mean; s.sd_ds = ds.sd;
        s.rv_hs = hs.mean != 0 ? hs.sd / hs.mean : 0;
        s.rv_h = h.mean != 0 ? h.sd / h.mean : 0;
        s.rv_ds = ds.mean != 0 ? ds.sd / ds.mean : 0;
        out.push_back(std::move(s));
    }
    return out;
}

struct HistogramBin {
    std::string quantity; // "H", "Hs" or "Ds"
    double lo = 0, hi = 0;
    std::uint64_t count = 0;
};

inline constexpr double kHistogramBinWidth = 0.1;

// Pooled fixed-width histograms of H, H_s and D_s over the whole corpus.
// Only occupied bins are emitted, in (quantity, lo) order.
inline std::vector<HistogramBin> pooled_histograms(const std::vector<OrderAnalysis>& analyses,
                                                   double bin_width = kHistogramBinWidth) {
    std::map<std::pair<std::string, long long>, std::uint64_t> bins;
    auto put = [&](const char* q, double v) {
        const long long b = static_cast<long long>(std::floor(v / bin_width));
        bins[{q, b}]++;
    };
    for (const auto& a : analyses) {
        put("H", a.h.bits_per_word);
        put("Hs", a.hs_exact);
        put("Ds", a.ds);
    }
    std::vector<HistogramBin> out;
    out.reserve(bins.size());
    for (const auto& [key, count] : bins) {
        HistogramBin hb;
        hb.quantity = key.first;
        hb.lo = static_cast<double>(key.second) * bin_width;
        hb.hi = hb.lo + bin_width;
        hb.count = count;
        out.push_back(std::move(hb));
    }
    return out;
}

} // namespace lexent
