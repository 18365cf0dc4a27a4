#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "lexent/corpus.hpp"
#include "lexent/errors.hpp"
#include "lexent/rng.hpp"

namespace lexent {

// Small Markov chain over K states with row-stochastic transition matrix T
// (row-major) and stationary distribution pi.
struct MarkovModel {
    std::size_t n_states = 0;
    std::vector<double> t;   // row-major n_states x n_states
    std::vector<double> pi;
    bool periodic = false;

    double at(std::size_t i, std::size_t j) const { return t[i * n_states + j]; }
};

namespace detail {

inline void check_row_stochastic(const std::vector<double>& t, std::size_t k) {
    if (k == 0 || t.size() != k * k)
        throw compute_error("markov: transition matrix must be K x K with K >= 1");
    for (std::size_t i = 0; i < k; ++i) {
        double row = 0;
        for (std::size_t j = 0; j < k; ++j) {
            const double v = t[i * k + j];
            if (v < 0 || !std::isfinite(v))
                throw compute_error("markov: negative or non-finite transition probability");
            row += v;
        }
        if (std::fabs(row - 1.0) > 1e-12)
            throw compute_error("markov: row " + std::to_string(i) + " sums to " +
                                std::to_string(row));
    }
}

inline bool strongly_connected(const std::vector<double>& t, std::size_t k) {
    auto reach = [&](bool forward) {
        std::vector<char> seen(k, 0);
        std::vector<std::size_t> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (std::size_t v = 0; v < k; ++v) {
                const double p = forward ? t[u * k + v] : t[v * k + u];
                if (p > 0 && !seen[v]) { seen[v] = 1; stack.push_back(v); }
            }
        }
        for (const char c : seen)
            if (!c) return false;
        return true;
    };
    return reach(true) && reach(false);
}

// gcd of cycle lengths through state 0; 1 means aperiodic
inline bool is_periodic(const std::vector<double>& t, std::size_t k) {
    std::vector<long long> level(k, -1);
    std::vector<std::size_t> queue{0};
    level[0] = 0;
    long long g = 0;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        const std::size_t u = queue[qi];
        for (std::size_t v = 0; v < k; ++v) {
            if (t[u * k + v] <= 0) continue;
            if (level[v] < 0) { level[v] = level[u] + 1; queue.push_back(v); }
            else g = std::gcd(g, level[u] + 1 - level[v]);
        }
    }
    return g != 1;
}

} // namespace detail

// Stationary distribution of an irreducible chain by direct linear solve of
// pi (T - I) = 0 with the normalisation sum pi = 1. For periodic chains this
// is the Cesaro limit.
inline std::vector<double> stationary(const std::vector<double>& t, std::size_t k) {
    detail::check_row_stochastic(t, k);
    if (!detail::strongly_connected(t, k))
        throw compute_error("stationary: chain is reducible, no unique stationary distribution");

    // columns of (T^t - I), last equation replaced by sum pi = 1
    std::vector<double> a(k * k, 0.0), b(k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            a[i * k + j] = t[j * k + i] - (i == j ? 1.0 : 0.0);
    for (std::size_t j = 0; j < k; ++j) a[(k - 1) * k + j] = 1.0;
    b[k - 1] = 1.0;

    // Gaussian elimination with partial pivoting
    std::vector<std::size_t> perm(k);
    for (std::size_t i = 0; i < k; ++i) perm[i] = i;
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < k; ++r)
            if (std::fabs(a[r * k + col]) > std::fabs(a[piv * k + col])) piv = r;
        if (std::fabs(a[piv * k + col]) < 1e-14)
            throw compute_error("stationary: singular system");
        if (piv != col) {
            for (std::size_t j = 0; j < k; ++j) std::swap(a[piv * k + j], a[col * k + j]);
            std::swap(b[piv], b[col]);
        }
        for (std::size_t r = col + 1; r < k; ++r) {
            const double f = a[r * k + col] / a[col * k + col];
            if (f == 0) continue;
            for (std::size_t j = col; j < k; ++j) a[r * k + j] -= f * a[col * k + j];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> pi(k, 0.0);
    for (std::size_t ri = k; ri-- > 0;) {
        double v = b[ri];
        for (std::size_t j = ri + 1; j < k; ++j) v -= a[ri * k + j] * pi[j];
        pi[ri] = v / a[ri * k + ri];
    }
    double sum = 0;
    for (double& v : pi) { if (v < 0 && v > -1e-12) v = 0; sum += v; }
    for (double& v : pi) v /= sum;
    return pi;
}

inline MarkovModel make_model(std::vector<double> t, std::size_t k) {
    MarkovModel m;
    m.n_states = k;
    m.pi = stationary(t, k);
    m.periodic = detail::is_periodic(t, k);
    m.t = std::move(t);
    return m;
}

// Symmetric stay/leave chain: stay probability q, remaining mass uniform
// over the other K-1 states.
inline MarkovModel symmetric_chain(std::size_t k, double q) {
    if (k < 2) throw compute_error("symmetric_chain: need K >= 2");
    if (q < 0 || q > 1) throw compute_error("symmetric_chain: q outside [0, 1]");
    std::vector<double> t(k * k, (1.0 - q) / static_cast<double>(k - 1));
    for (std::size_t i = 0; i < k; ++i) t[i * k + i] = q;
    MarkovModel m;
    m.n_states = k;
    m.t = std::move(t);
    m.pi.assign(k, 1.0 / static_cast<double>(k));
    m.periodic = (q == 0.0 && k == 2);
    return m;
}

// H = -sum_i pi_i sum_j T_ij log2 T_ij
inline double entropy_rate(const MarkovModel& m) {
    double h = 0.0;
    for (std::size_t i = 0; i < m.n_states; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < m.n_states; ++j) {
            const double p = m.at(i, j);
            if (p > 0) row -= p * std::log2(p);
        }
        h += m.pi[i] * row;
    }
    return h;
}

// Entropy of the stationary distribution; plays the role of the shuffled
// (frequency-only) entropy for the toy models.
inline double unigram_entropy(const MarkovModel& m) {
    double h = 0.0;
    for (const double p : m.pi)
        if (p > 0) h -= p * std::log2(p);
    return h;
}

inline double relative_entropy(const MarkovModel& m) {
    return unigram_entropy(m) - entropy_rate(m);
}

struct FrontierPoint {
    std::size_t n_states = 0;
    double q = 0.0;
    double unigram = 0.0;
    double rate = 0.0;
    double d = 0.0;
};

inline constexpr double kFrontierTolerance = 1e-10;

// For each K, the stay probability q of the symmetric chain holding
// D(K, q) = d_target. D is 0 at q = 1/K and log2 K at q = 1 and increases in
// between, so bisection applies. K values without a root are skipped.
inline std::vector<FrontierPoint> constancy_frontier(const std::vector<std::size_t>& k_values,
                                                     double d_target,
                                                     double tol = kFrontierTolerance) {
    std::vector<FrontierPoint> out;
    for (const std::size_t k : k_values) {
        if (k < 2) continue;
        const double dmax = std::log2(static_cast<double>(k));
        if (d_target < 0 || d_target >= dmax) continue; // no root in (1/K, 1)
        auto d_of = [&](double q) { return relative_entropy(symmetric_chain(k, q)); };
        double lo = 1.0 / static_cast<double>(k), hi = 1.0;
        // d_of(lo) = 0 <= target, d_of(hi^-) -> log2 K > target
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double d = d_of(mid);
            if (std::fabs(d - d_target) <= tol) { lo = hi = mid; break; }
            if (d < d_target) lo = mid;
            else hi = mid;
            if (hi - lo < 1e-15) break;
        }
        FrontierPoint p;
        p.n_states = k;
        p.q = 0.5 * (lo + hi);
        const MarkovModel m = symmetric_chain(k, p.q);
        p.unigram = unigram_entropy(m);
        p.rate = entropy_rate(m);
        p.d = p.unigram - p.rate;
        out.push_back(p);
    }
    return out;
}

namespace detail {

// spreadsheet-style base-26 names: a, b, ..., z, aa, ab, ...
inline std::string state_word(std::size_t i) {
    std::string s;
    std::size_t v = i + 1;
    while (v > 0) {
        v -= 1;
        s.insert(s.begin(), static_cast<char>('a' + v % 26));
        v /= 26;
    }
    return s;
}

} // namespace detail

// Seeded trajectory from a stationary start, as a TokenizedText over
// alphabetic state names so the downstream estimators see ordinary tokens.
inline TokenizedText sample_sequence(const MarkovModel& m, std::uint64_t n, std::uint64_t seed) {
    if (n < 1) throw compute_error("sample_sequence: need N >= 1");
    TokenizedText text;
    text.source_id = "markov";
    for (std::size_t i = 0; i < m.n_states; ++i) text.intern(detail::state_word(i));
    text.tokens.reserve(n);
    Rng rng(seed);
    auto draw = [&](const double* dist) {
        double u = rng.unit();
        for (std::size_t j = 0; j + 1 < m.n_states; ++j) {
            u -= dist[j];
            if (u < 0) return j;
        }
        return m.n_states - 1;
    };
    std::size_t state = draw(m.pi.data());
    for (std::uint64_t i = 0; i < n; ++i) {
        text.tokens.push_back(static_cast<std::uint32_t>(state));
        text.counts[state]++;
        state = draw(&m.t[state * m.n_states]);
    }
    return text;
}

} // namespace lexent
