#pragma once

#include <cstdint>
#include <random>

namespace forge {

/// Deterministic random stream.
///
/// Wraps std::mt19937_64 (whose output sequence is fully pinned by the
/// standard) and performs all integer/real conversions with fixed bit-exact
/// algorithms instead of the library distributions, so that a given seed
/// produces identical draws on every platform and standard library.
class Rng {
public:
    /// The raw seed is passed through a SplitMix64 finalizer before it
    /// reaches the engine, so that adjacent seeds yield unrelated streams.
    explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

    /// Derived stream `index` of a master seed.  Streams are obtained by
    /// stepping the seed by odd multiples of the golden-ratio constant:
    ///
    ///   stream(m, i) == Rng(m + (i + 1) * 0x9E3779B97F4A7C15)
    ///
    /// Distinct indices give independent-looking streams, and no stream
    /// coincides with Rng(m) itself.  Replicate r of an experiment uses
    /// stream(master, r), which makes results independent of how replicates
    /// are scheduled across threads.
    static Rng stream(std::uint64_t master_seed, std::uint64_t index) {
        return Rng(master_seed + (index + 1) * 0x9E3779B97F4A7C15ULL);
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1), 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound), unbiased (rejection on the slice of
    /// 2^64 not divisible by bound).  bound must be positive.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

private:
    static std::uint64_t mix64(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::mt19937_64 engine_;
};

} // namespace forge
