#pragma once

#include <cstdint>
#include <span>

namespace oc {

/// Deterministic random stream: xoshiro256++ seeded through splitmix64.
///
/// The generator algorithm is part of the reproducibility contract: a given
/// seed produces the same draw sequence on every build of this library.
/// Streams are splittable via substream(); one stream per training run.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed) {
        std::uint64_t x = seed;
        for (auto& w : state_) w = splitmix64(x);
    }

    /// Independent stream derived from (seed, index).
    RngStream substream(std::uint64_t index) const {
        std::uint64_t x = seed_ + (index + 1) * 0x9e3779b97f4a7c15ull;
        return RngStream(splitmix64(x));
    }

    std::uint64_t seed() const { return seed_; }

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

    /// Uniform double in [0,1), 53 mantissa bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer in [0,n). Lemire multiply-shift (bias < n/2^64).
    int uniform_int(int n) {
        return static_cast<int>((static_cast<unsigned __int128>(next_u64()) *
                                 static_cast<unsigned __int128>(n)) >> 64);
    }

    /// Index drawn from an (approximately normalized) probability vector.
    /// Never returns an index with zero probability.
    int categorical(std::span<const double> probs) {
        const double u = uniform();
        double cum = 0.0;
        int last_positive = -1;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            if (probs[i] <= 0.0) continue;
            last_positive = static_cast<int>(i);
            cum += probs[i];
            if (u < cum) return last_positive;
        }
        return last_positive;  // float shortfall in the cumulative sum
    }

private:
    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    static std::uint64_t splitmix64(std::uint64_t&& x) {
        std::uint64_t y = x;
        return splitmix64(y);
    }
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    std::uint64_t state_[4];
    std::uint64_t seed_;
};

}  // namespace oc
