#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "lexent/corpus.hpp"
#include "lexent/errors.hpp"
#include "lexent/rng.hpp"

namespace lexent {

// Occurrence counts of every word over P equal parts of length s. Trailing
// tokens beyond P*s are discarded. Stored sparse (CSR over words).
struct PartitionProfile {
    std::uint64_t s = 0, parts = 0, n_used = 0;
    std::uint32_t vocab_size = 0;
    std::vector<std::uint64_t> word_count; // n_w within the covered span
    std::vector<std::uint64_t> row_begin;  // size vocab_size + 1
    std::vector<std::uint32_t> part;       // part index per nonzero cell
    std::vector<std::uint32_t> count;      // n_{w,j} per nonzero cell

    std::uint64_t occurrences(std::uint32_t w) const { return word_count[w]; }
};

inline PartitionProfile partition(const TokenizedText& text, std::uint64_t s) {
    const std::uint64_t n = text.size();
    if (s < 1 || s > n)
        throw compute_error("partition: part length " + std::to_string(s) +
                            " out of range for N=" + std::to_string(n));
    PartitionProfile pr;
    pr.s = s;
    pr.parts = n / s;
    pr.n_used = pr.parts * s;
    pr.vocab_size = text.vocab_size();
    const std::uint32_t k = pr.vocab_size;
    pr.word_count.assign(k, 0);
    pr.row_begin.assign(k + 1, 0);

    // tokens arrive in part order, so a change of part for a word opens a new
    // nonzero cell; two passes give exact CSR sizes without per-word buffers
    std::vector<std::uint32_t> lastpart(k, 0xFFFFFFFFu);
    for (std::uint64_t t = 0; t < pr.n_used; ++t) {
        const std::uint32_t w = text.tokens[t];
        const auto j = static_cast<std::uint32_t>(t / s);
        if (lastpart[w] != j) { pr.row_begin[w + 1]++; lastpart[w] = j; }
    }
    for (std::uint32_t w = 0; w < k; ++w) pr.row_begin[w + 1] += pr.row_begin[w];
    pr.part.assign(pr.row_begin[k], 0);
    pr.count.assign(pr.row_begin[k], 0);

    std::vector<std::uint64_t> cursor(pr.row_begin.begin(), pr.row_begin.end() - 1);
    std::fill(lastpart.begin(), lastpart.end(), 0xFFFFFFFFu);
    for (std::uint64_t t = 0; t < pr.n_used; ++t) {
        const std::uint32_t w = text.tokens[t];
        const auto j = static_cast<std::uint32_t>(t / s);
        if (lastpart[w] != j) {
            pr.part[cursor[w]] = j;
            lastpart[w] = j;
            ++cursor[w];
        }
        pr.count[cursor[w] - 1]++;
        pr.word_count[w]++;
    }
    return pr;
}

// H(J|w) = -sum_j (n_j/n) log2(n_j/n), with 0 log 0 = 0.
inline double word_entropy(const PartitionProfile& pr, std::uint32_t w) {
    const std::uint64_t n = pr.word_count[w];
    if (n == 0)
        throw compute_error("word_entropy: word " + std::to_string(w) +
                            " absent from the covered span");
    double acc = 0.0; // sum n_j log2 n_j
    for (std::uint64_t i = pr.row_begin[w]; i < pr.row_begin[w + 1]; ++i)
        acc += static_cast<double>(pr.count[i]) * std::log2(static_cast<double>(pr.count[i]));
    return std::log2(static_cast<double>(n)) - acc / static_cast<double>(n);
}

namespace detail {

inline double lchoose(double n, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

} // namespace detail

// Exact expectation of H(J|w) under a uniform random permutation of the
// text. Parts are exchangeable, so each part's occupancy is hypergeometric:
//   <H> = P * sum_{k=1}^{min(n,s)} HG(k; N, s, n) * (k/n) * log2(n/k)
// with HG(k) = C(s,k) C(N-s, n-k) / C(N,n), evaluated in log space.
inline double expected_shuffled_entropy(std::uint64_t n, std::uint64_t parts, std::uint64_t s,
                                        std::uint64_t n_used) {
    if (parts < 1 || s < 1 || parts * s != n_used)
        throw compute_error("expected_shuffled_entropy: inconsistent partition parameters");
    if (n < 1 || n > n_used)
        throw compute_error("expected_shuffled_entropy: word count out of range");
    const double l_all = detail::lchoose(static_cast<double>(n_used), static_cast<double>(n));
    const std::uint64_t kmax = std::min(n, s);
    double h = 0.0;
    for (std::uint64_t k = 1; k <= kmax; ++k) {
        if (n - k > n_used - s) continue; // infeasible split
        const double lp = detail::lchoose(static_cast<double>(s), static_cast<double>(k)) +
                          detail::lchoose(static_cast<double>(n_used - s),
                                          static_cast<double>(n - k)) -
                          l_all;
        h += std::exp(lp) * (static_cast<double>(k) / static_cast<double>(n)) *
             std::log2(static_cast<double>(n) / static_cast<double>(k));
    }
    return static_cast<double>(parts) * h;
}

// Memo for expected_shuffled_entropy at a fixed partition geometry; words
// sharing a count share the baseline.
class BaselineCache {
public:
    BaselineCache(std::uint64_t parts, std::uint64_t s, std::uint64_t n_used)
        : parts_(parts), s_(s), n_used_(n_used) {}

    double operator()(std::uint64_t n) {
        auto it = memo_.find(n);
        if (it != memo_.end()) return it->second;
        const double v = expected_shuffled_entropy(n, parts_, s_, n_used_);
        memo_.emplace(n, v);
        return v;
    }

    bool matches(const PartitionProfile& pr) const {
        return pr.parts == parts_ && pr.s == s_ && pr.n_used == n_used_;
    }

private:
    std::uint64_t parts_, s_, n_used_;
    std::unordered_map<std::uint64_t, double> memo_;
};

struct MonteCarloEntropy {
    double mean = 0.0;
    double stderr_of_mean = 0.0;
    std::uint64_t reps = 0;
};

// Validation path for the analytic baseline: mean of word_entropy over
// seeded full-text shuffles.
inline MonteCarloEntropy monte_carlo_shuffled_entropy(const TokenizedText& text, std::uint32_t w,
                                                      std::uint64_t s, std::uint64_t reps,
                                                      std::uint64_t seed) {
    if (reps < 1) throw compute_error("monte_carlo_shuffled_entropy: reps must be >= 1");
    const std::uint64_t n = text.size();
    const std::uint64_t parts = n / s;
    const std::uint64_t n_used = parts * s;
    if (parts < 1) throw compute_error("monte_carlo_shuffled_entropy: s > N");
    Rng rng(seed);
    std::vector<std::uint32_t> tokens = text.tokens;
    std::vector<std::uint64_t> per_part(parts);
    double sum = 0, sum2 = 0;
    for (std::uint64_t r = 0; r < reps; ++r) {
        rng.shuffle(tokens);
        std::fill(per_part.begin(), per_part.end(), 0);
        std::uint64_t n_w = 0;
        for (std::uint64_t t = 0; t < n_used; ++t) {
            if (tokens[t] == w) { per_part[t / s]++; ++n_w; }
        }
        double h = 0.0;
        if (n_w > 0) {
            double acc = 0.0;
            for (const std::uint64_t c : per_part)
                if (c > 0) acc += static_cast<double>(c) * std::log2(static_cast<double>(c));
            h = std::log2(static_cast<double>(n_w)) - acc / static_cast<double>(n_w);
        }
        sum += h;
        sum2 += h * h;
    }
    MonteCarloEntropy out;
    out.reps = reps;
    out.mean = sum / static_cast<double>(reps);
    if (reps > 1) {
        const double var = (sum2 - sum * sum / static_cast<double>(reps)) /
                           static_cast<double>(reps - 1);
        out.stderr_of_mean = std::sqrt(std::max(0.0, var) / static_cast<double>(reps));
    }
    return out;
}

// M(J,W) = sum_w p(w) sum_j p(j|w) log2( p(j|w) / p(j) ), p(j) = 1/P.
inline double mutual_information(const PartitionProfile& pr) {
    if (pr.n_used == 0) throw compute_error("mutual_information: empty profile");
    const double n_used = static_cast<double>(pr.n_used);
    const double parts = static_cast<double>(pr.parts);
    double m = 0.0;
    for (std::uint32_t w = 0; w < pr.vocab_size; ++w) {
        const std::uint64_t n = pr.word_count[w];
        if (n == 0) continue;
        const double pw = static_cast<double>(n) / n_used;
        double inner = 0.0;
        for (std::uint64_t i = pr.row_begin[w]; i < pr.row_begin[w + 1]; ++i) {
            const double pjw = static_cast<double>(pr.count[i]) / static_cast<double>(n);
            inner += pjw * std::log2(pjw * parts);
        }
        m += pw * inner;
    }
    return m;
}

// Analytic mutual information of the shuffled ensemble:
// <M^> = sum_w p(w) ( log2 P - <H^(J|w)> ).
inline double random_mutual_information(const PartitionProfile& pr, BaselineCache& cache) {
    const double log2p = std::log2(static_cast<double>(pr.parts));
    double m = 0.0;
    for (std::uint32_t w = 0; w < pr.vocab_size; ++w) {
        const std::uint64_t n = pr.word_count[w];
        if (n == 0) continue;
        m += (static_cast<double>(n) / static_cast<double>(pr.n_used)) * (log2p - cache(n));
    }
    return m;
}

inline double random_mutual_information(const PartitionProfile& pr) {
    BaselineCache cache(pr.parts, pr.s, pr.n_used);
    return random_mutual_information(pr, cache);
}

// Delta I(s) = sum_w p(w) [ <H^(J|w)> - H(J|w) ].
inline double information_from_profile(const PartitionProfile& pr, BaselineCache& cache) {
    double di = 0.0;
    for (std::uint32_t w = 0; w < pr.vocab_size; ++w) {
        const std::uint64_t n = pr.word_count[w];
        if (n == 0) continue;
        di += (static_cast<double>(n) / static_cast<double>(pr.n_used)) *
              (cache(n) - word_entropy(pr, w));
    }
    return di;
}

inline double information(const TokenizedText& text, std::uint64_t s, BaselineCache& cache) {
    const PartitionProfile pr = partition(text, s);
    if (!cache.matches(pr)) throw compute_error("information: cache geometry mismatch");
    return information_from_profile(pr, cache);
}

inline double information(const TokenizedText& text, std::uint64_t s) {
    const PartitionProfile pr = partition(text, s);
    BaselineCache cache(pr.parts, pr.s, pr.n_used);
    return information_from_profile(pr, cache);
}

struct InfoCurvePoint {
    std::uint64_t s = 0, parts = 0;
    double delta_i = 0.0;
};

struct InfoCurve {
    std::vector<InfoCurvePoint> points;
    std::uint64_t s_star = 0;
    double delta_i_max = 0.0;
};

inline constexpr int kGridPointsPerDecade = 24;
inline constexpr std::uint64_t kGridMinScale = 10;

// Geometric grid, kGridPointsPerDecade points per decade, from 10 to N/4.
inline std::vector<std::uint64_t> default_scale_grid(std::uint64_t n_tokens,
                                                     int per_decade = kGridPointsPerDecade,
                                                     std::uint64_t s_min = kGridMinScale) {
    std::vector<std::uint64_t> grid;
    const double s_max = static_cast<double>(n_tokens) / 4.0;
    if (s_max < static_cast<double>(s_min))
        return {std::max<std::uint64_t>(1, static_cast<std::uint64_t>(s_max))};
    const double ratio = std::pow(10.0, 1.0 / per_decade);
    for (double v = static_cast<double>(s_min); v <= s_max; v *= ratio) {
        const auto s = static_cast<std::uint64_t>(v + 0.5);
        if (grid.empty() || s > grid.back()) grid.push_back(s);
    }
    return grid;
}

// Delta I at every grid scale; s_star is the argmax, ties broken toward the
// smaller scale. The grid must be ascending.
inline InfoCurve scan_scales(const TokenizedText& text, const std::vector<std::uint64_t>& grid) {
    if (grid.empty()) throw compute_error("scan_scales: empty grid");
    InfoCurve curve;
    curve.delta_i_max = -1e300;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (i > 0 && grid[i] <= grid[i - 1])
            throw compute_error("scan_scales: grid must be strictly ascending");
        const std::uint64_t s = grid[i];
        const PartitionProfile pr = partition(text, s);
        BaselineCache cache(pr.parts, pr.s, pr.n_used);
        const double di = information_from_profile(pr, cache);
        curve.points.push_back({s, pr.parts, di});
        if (di > curve.delta_i_max) {
            curve.delta_i_max = di;
            curve.s_star = s;
        }
    }
    return curve;
}

// Per-word information at scale s.
struct WordInfo {
    std::uint32_t word = 0;
    std::uint64_t n = 0;      // occurrences in the covered span
    double h_obs = 0.0;       // H(J|w)
    double h_rand = 0.0;      // <H^(J|w)>
    double delta_i = 0.0;     // (n/N_used) * (h_rand - h_obs)
};

// All words occurring in the covered span, ranked by delta_i descending;
// ties broken by frequency (descending) then word string.
inline std::vector<WordInfo> rank_keywords(const TokenizedText& text, std::uint64_t s) {
    const PartitionProfile pr = partition(text, s);
    BaselineCache cache(pr.parts, pr.s, pr.n_used);
    std::vector<WordInfo> out;
    out.reserve(pr.vocab_size);
    for (std::uint32_t w = 0; w < pr.vocab_size; ++w) {
        const std::uint64_t n = pr.word_count[w];
        if (n == 0) continue;
        WordInfo wi;
        wi.word = w;
        wi.n = n;
        wi.h_obs = word_entropy(pr, w);
        wi.h_rand = cache(n);
        wi.delta_i = (static_cast<double>(n) / static_cast<double>(pr.n_used)) *
                     (wi.h_rand - wi.h_obs);
        out.push_back(wi);
    }
    std::sort(out.begin(), out.end(), [&text](const WordInfo& a, const WordInfo& b) {
        if (a.delta_i != b.delta_i) return a.delta_i > b.delta_i;
        if (a.n != b.n) return a.n > b.n;
        return text.word(a.word) < text.word(b.word);
    });
    return out;
}

} // namespace lexent
