#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "lexent/corpus.hpp"
#include "lexent/errors.hpp"
#include "lexent/suffix_automaton.hpp"

namespace lexent {

enum class Estimator { match_length, lz78_parse, boltzmann_exact, markov_exact };

inline const char* estimator_name(Estimator e) {
    switch (e) {
        case Estimator::match_length: return "match_length";
        case Estimator::lz78_parse: return "lz78_parse";
        case Estimator::boltzmann_exact: return "boltzmann_exact";
        case Estimator::markov_exact: return "markov_exact";
    }
    return "?";
}

struct EntropyEstimate {
    double bits_per_word = 0.0;
    Estimator estimator = Estimator::match_length;
    std::uint64_t n_tokens = 0;

    // diagnostics
    std::optional<double> mean_match_length;
    std::optional<std::uint64_t> phrase_count;
    bool low_confidence = false;   // N below the soft minimum of 100
    bool exceeds_log2k = false;    // estimate above log2(K) + margin
};

// Flagging margin for bits_per_word > log2 K; small-sample estimators can
// overshoot the alphabet bound slightly.
inline constexpr double kEntropyOvershootMargin = 1.0;

// Increasing-window match-length estimator:
//   H = [ (1/(N-1)) * sum_{i=2}^{N} lambda_i / log2(i) ]^{-1}
// The i = 1 term is dropped (log2(1) = 0).
inline EntropyEstimate entropy_match_length(const TokenizedText& text) {
    const std::uint64_t n = text.size();
    if (n < 2) throw compute_error("entropy_match_length: need at least 2 tokens");
    const MatchLengthProfile prof = match_lengths(text.tokens);

    double sum_ratio = 0.0;
    double sum_lambda = 0.0;
    for (std::size_t k = 0; k < prof.lambda.size(); ++k) {
        const double i = static_cast<double>(k) + 2.0; // 1-based position
        sum_ratio += prof.lambda[k] / std::log2(i);
        sum_lambda += prof.lambda[k];
    }
    const double m = static_cast<double>(prof.lambda.size());

    EntropyEstimate est;
    est.estimator = Estimator::match_length;
    est.n_tokens = n;
    est.bits_per_word = m / sum_ratio;
    est.mean_match_length = sum_lambda / m;
    est.low_confidence = n < 100;
    const double logk = std::log2(static_cast<double>(text.vocab_size()));
    est.exceeds_log2k = est.bits_per_word > logk + kEntropyOvershootMargin;
    return est;
}

// LZ78 incremental parse: C distinct phrases (a trailing incomplete phrase
// counts); estimate (C * log2 C) / N.
inline EntropyEstimate entropy_lz78(const TokenizedText& text) {
    const std::uint64_t n = text.size();
    if (n < 2) throw compute_error("entropy_lz78: need at least 2 tokens");

    std::unordered_map<std::uint64_t, std::uint32_t> trie; // (node, sym) -> node
    trie.reserve(text.tokens.size());
    std::uint32_t next_node = 1; // 0 is the root
    std::uint64_t phrases = 0;
    std::uint32_t cur = 0;
    for (const std::uint32_t sym : text.tokens) {
        const std::uint64_t key = (static_cast<std::uint64_t>(cur) << 32) | sym;
        auto it = trie.find(key);
        if (it != trie.end()) {
            cur = it->second;
        } else {
            trie.emplace(key, next_node++);
            ++phrases;
            cur = 0;
        }
    }
    if (cur != 0) ++phrases;

    EntropyEstimate est;
    est.estimator = Estimator::lz78_parse;
    est.n_tokens = n;
    const double c = static_cast<double>(phrases);
    est.bits_per_word = c * std::log2(c) / static_cast<double>(n);
    est.phrase_count = phrases;
    est.low_confidence = n < 100;
    const double logk = std::log2(static_cast<double>(text.vocab_size()));
    est.exceeds_log2k = est.bits_per_word > logk + kEntropyOvershootMargin;
    return est;
}

} // namespace lexent
