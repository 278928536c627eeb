#pragma once

#include <cstdint>
#include <initializer_list>

namespace cacnn {

// SplitMix64 (Steele, Lea, Vigna). Counter-based: output i is mix(seed + i*GAMMA),
// so streams derived from distinct seeds are independent and the sequence is
// reproducible across platforms.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    // Unbiased integer in [0, n), n >= 1. Rejection sampling on the top range.
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t threshold = (0ULL - n) % n;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Uniform double in [lo, hi).
    double next_double(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // Fisher-Yates shuffle of [first, first+n).
    template <typename T>
    void shuffle(T* first, std::size_t n) {
        for (std::size_t i = n; i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(next_below(i));
            T tmp = first[i - 1];
            first[i - 1] = first[j];
            first[j] = tmp;
        }
    }

private:
    std::uint64_t state_;
};

// Derives a child seed from a base seed and a list of indices by folding each
// value through the SplitMix64 finalizer: h = mix(h ^ mix(v + i + 1)).
// The position term keeps mix(s, {a, b}) != mix(s, {b, a}).
inline std::uint64_t mix_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = SplitMix64::mix(base);
    std::uint64_t i = 0;
    for (std::uint64_t v : parts) {
        h = SplitMix64::mix(h ^ SplitMix64::mix(v + (++i)));
    }
    return h;
}

}  // namespace cacnn
