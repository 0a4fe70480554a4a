#pragma once

#include <cmath>
#include <cstdint>

// Deterministic random source. xoshiro256++ seeded through splitmix64,
// with all distribution transforms implemented here so that streams are
// reproducible across standard libraries and platforms. Substreams for
// parallel work are derived from (seed, generation, index) and are
// stable regardless of thread count.

namespace heave {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64_next(sm);
    }

    // Substream for a (generation, index) work item.
    static Rng substream(std::uint64_t seed, std::uint64_t generation, std::uint64_t index) {
        std::uint64_t sm = seed;
        std::uint64_t a = splitmix64_next(sm) ^ (generation * 0xD1342543DE82EF95ULL);
        std::uint64_t b = splitmix64_next(sm) ^ (index * 0xAF251AF3B0F025B5ULL);
        std::uint64_t mix = a;
        mix ^= splitmix64_next(b);
        Rng r(0);
        std::uint64_t sm2 = mix;
        for (auto& word : r.state_) word = splitmix64_next(sm2);
        return r;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [lo, hi] inclusive.
    int uniform_int(int lo, int hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(bounded(span));
    }

    // Standard normal via Marsaglia polar with a cached spare.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double scale = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * scale;
        has_spare_ = true;
        return u * scale;
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Geometric on {1, 2, ...} with mean `mean_step` (success prob 1/mean_step).
    int geometric(double mean_step) {
        if (mean_step <= 1.0) return 1;
        const double q = 1.0 / mean_step;
        const double u = uniform();
        const double k = std::ceil(std::log1p(-u) / std::log1p(-q));
        return k < 1.0 ? 1 : static_cast<int>(k);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    // Lemire's multiply-shift bounded draw with rejection (unbiased).
    std::uint64_t bounded(std::uint64_t span) {
        unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * span;
        auto low = static_cast<std::uint64_t>(m);
        if (low < span) {
            const std::uint64_t threshold = (0ULL - span) % span;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(next_u64()) * span;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace heave
