#pragma once

#include <cstdint>
#include <vector>

namespace lexent {

// Deterministic xoshiro256** generator. The point over std::mt19937_64 +
// distributions is full reproducibility: std::uniform_int_distribution is
// implementation-defined, so seeded runs would not be portable across
// standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        // expand the seed with splitmix64
        std::uint64_t z = seed;
        for (auto& w : state_) {
            z += 0x9e3779b97f4a7c15ULL;
            std::uint64_t x = z;
            x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
            x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
            w = x ^ (x >> 31);
        }
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform in [0, n), unbiased via rejection
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (~n + 1) % n; // 2^64 mod n
        for (;;) {
            std::uint64_t v = next();
            if (v >= threshold) return v % n;
        }
    }

    // uniform double in [0, 1)
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // in-place Fisher-Yates
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t state_[4];
};

// Documented project-wide default seed; CLI runs use it unless overridden.
inline constexpr std::uint64_t kDefaultSeed = 8675309;

} // namespace lexent
