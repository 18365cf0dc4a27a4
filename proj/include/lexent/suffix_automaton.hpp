#pragma once

#include <cstdint>
#include <vector>

#include "lexent/errors.hpp"

namespace lexent {

namespace detail {

// Open-addressing (state, symbol) -> state map. One flat table instead of a
// container per state: the automaton over word ids can have 10^5+ distinct
// symbols out of a single state, and 2N states for N up to 10^7.
class TransitionMap {
public:
    explicit TransitionMap(std::size_t expected = 64) { rehash(slots_for(expected)); }

    std::uint32_t find(std::uint32_t state, std::uint32_t sym) const {
        const std::uint64_t k = key(state, sym);
        std::size_t i = index(k);
        while (keys_[i] != kEmpty) {
            if (keys_[i] == k) return vals_[i];
            i = (i + 1) & mask_;
        }
        return kAbsent;
    }

    // insert or overwrite
    void set(std::uint32_t state, std::uint32_t sym, std::uint32_t to) {
        const std::uint64_t k = key(state, sym);
        std::size_t i = index(k);
        while (keys_[i] != kEmpty) {
            if (keys_[i] == k) { vals_[i] = to; return; }
            i = (i + 1) & mask_;
        }
        keys_[i] = k;
        vals_[i] = to;
        if (++size_ * 5 > keys_.size() * 3) grow();
    }

    static constexpr std::uint32_t kAbsent = 0xFFFFFFFFu;

private:
    static constexpr std::uint64_t kEmpty = ~0ULL;

    static std::uint64_t key(std::uint32_t s, std::uint32_t c) {
        return (static_cast<std::uint64_t>(s) << 32) | c;
    }
    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }
    std::size_t index(std::uint64_t k) const { return mix(k) & mask_; }

    static std::size_t slots_for(std::size_t n) {
        std::size_t s = 64;
        while (s * 3 < n * 5) s <<= 1; // keep load below 0.6
        return s;
    }

    void rehash(std::size_t slots) {
        keys_.assign(slots, kEmpty);
        vals_.assign(slots, 0);
        mask_ = slots - 1;
    }

    void grow() {
        std::vector<std::uint64_t> ok;
        std::vector<std::uint32_t> ov;
        ok.swap(keys_);
        ov.swap(vals_);
        rehash(ok.size() * 2);
        for (std::size_t i = 0; i < ok.size(); ++i) {
            if (ok[i] == kEmpty) continue;
            std::size_t j = index(ok[i]);
            while (keys_[j] != kEmpty) j = (j + 1) & mask_;
            keys_[j] = ok[i];
            vals_[j] = ov[i];
        }
    }

    std::vector<std::uint64_t> keys_;
    std::vector<std::uint32_t> vals_;
    std::size_t mask_ = 0;
    std::size_t size_ = 0;
};

} // namespace detail

// Suffix automaton over 32-bit symbols. Tracks per state the end position of
// the first occurrence, which is what the match-length queries need.
class SuffixAutomaton {
public:
    explicit SuffixAutomaton(std::size_t expected_symbols = 0)
        : trans_(3 * expected_symbols + 16) {
        const std::size_t cap = 2 * expected_symbols + 4;
        len_.reserve(cap);
        link_.reserve(cap);
        firstpos_.reserve(cap);
        head_.reserve(cap);
        sym_nodes_.reserve(3 * expected_symbols + 4);
        len_.push_back(0);
        link_.push_back(kNone);
        firstpos_.push_back(0);
        head_.push_back(kNone);
        last_ = 0;
    }

    template <typename Seq>
    static SuffixAutomaton build(const Seq& seq) {
        SuffixAutomaton sam(seq.size());
        std::uint32_t pos = 0;
        for (const auto s : seq) sam.push(static_cast<std::uint32_t>(s), pos++);
        return sam;
    }

    // extend with symbol c occurring at 0-based position pos
    void push(std::uint32_t c, std::uint32_t pos) {
        const std::uint32_t cur = new_state(len_[last_] + 1, 0, pos);
        std::uint32_t p = last_;
        while (p != kNone && trans_.find(p, c) == detail::TransitionMap::kAbsent) {
            add_edge(p, c, cur);
            p = link_[p];
        }
        if (p == kNone) {
            link_[cur] = 0;
        } else {
            const std::uint32_t q = trans_.find(p, c);
            if (len_[p] + 1 == len_[q]) {
                link_[cur] = q;
            } else {
                const std::uint32_t clone = new_state(len_[p] + 1, link_[q], firstpos_[q]);
                for (std::uint32_t n = head_[q]; n != kNone; n = sym_nodes_[n].next)
                    add_edge(clone, sym_nodes_[n].sym, trans_.find(q, sym_nodes_[n].sym));
                while (p != kNone && trans_.find(p, c) == q) {
                    trans_.set(p, c, clone); // redirect, symbol already listed
                    p = link_[p];
                }
                link_[q] = clone;
                link_[cur] = clone;
            }
        }
        last_ = cur;
    }

    std::uint32_t transition(std::uint32_t state, std::uint32_t sym) const {
        return trans_.find(state, sym);
    }
    std::uint32_t link(std::uint32_t state) const { return link_[state]; }
    std::uint32_t length(std::uint32_t state) const { return len_[state]; }
    std::uint32_t first_end_pos(std::uint32_t state) const { return firstpos_[state]; }
    std::size_t state_count() const { return len_.size(); }

    static constexpr std::uint32_t kNone = 0xFFFFFFFFu;
    static constexpr std::uint32_t kAbsent = detail::TransitionMap::kAbsent;

private:
    std::uint32_t new_state(std::uint32_t len, std::uint32_t link, std::uint32_t fp) {
        len_.push_back(len);
        link_.push_back(link);
        firstpos_.push_back(fp);
        head_.push_back(kNone);
        return static_cast<std::uint32_t>(len_.size() - 1);
    }

    void add_edge(std::uint32_t from, std::uint32_t sym, std::uint32_t to) {
        sym_nodes_.push_back({sym, head_[from]});
        head_[from] = static_cast<std::uint32_t>(sym_nodes_.size() - 1);
        trans_.set(from, sym, to);
    }

    struct SymNode { std::uint32_t sym, next; };

    detail::TransitionMap trans_;
    std::vector<std::uint32_t> len_, link_, firstpos_, head_;
    std::vector<SymNode> sym_nodes_;
    std::uint32_t last_;
};

// Per-position match lengths. lambda[i-2] is, for 1-based position i, one
// plus the length of the longest substring starting at i that also occurs as
// a contiguous substring lying fully inside positions [1, i-1].
struct MatchLengthProfile {
    std::vector<std::uint32_t> lambda; // for i = 2..N
    std::uint64_t n_tokens = 0;
};

// O(N log-ish) via the suffix automaton of the whole sequence: a candidate
// match u = x[i..i+l-1] occurs inside the prefix x[1..i-1] exactly when the
// first occurrence of u ends before position i. Sliding i -> i+1 shortens u
// by its first symbol, which is at most one suffix-link step, so the whole
// walk is amortised linear in the number of transitions taken.
inline MatchLengthProfile match_lengths(const std::vector<std::uint32_t>& tokens) {
    const std::size_t n = tokens.size();
    if (n < 2) throw compute_error("match_lengths: need at least 2 tokens");
    const SuffixAutomaton sam = SuffixAutomaton::build(tokens);

    MatchLengthProfile out;
    out.n_tokens = n;
    out.lambda.resize(n - 1);
    std::uint32_t s = 0, l = 0;
    for (std::size_t q = 1; q < n; ++q) { // 0-based start of the query suffix
        if (l > 0) {
            --l;
            if (l == 0) s = 0;
            else if (l <= sam.length(sam.link(s))) s = sam.link(s);
        }
        while (q + l < n) {
            const std::uint32_t t = sam.transition(s, tokens[q + l]);
            if (t == SuffixAutomaton::kAbsent) break;
            if (sam.first_end_pos(t) + 1 > q) break; // would not fit inside the past
            s = t;
            ++l;
        }
        out.lambda[q - 1] = l + 1;
    }
    return out;
}

} // namespace lexent
