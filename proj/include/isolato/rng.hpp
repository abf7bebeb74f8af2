#pragma once

/**
 * RngStream: deterministic pseudo-random stream with independent substreams.
 *
 * SplittableRandom-style generator: state advances by a per-stream odd
 * increment (gamma) and the output is the Stafford mix13 finalizer of the
 * state. Each (seed, substream) pair selects both a random entry point and
 * its own gamma, so substreams are statistically independent regardless of
 * thread scheduling, and a stream is fully determined by
 * (seed, substream, draw count). The underlying SplitMix64 construction
 * passes BigCrush.
 */

#include <bit>
#include <cstdint>

namespace isolato {

namespace detail {

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

// Stafford variant 13 of the 64-bit mix function.
inline std::uint64_t mix_stafford13(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// MurmurHash3 finalizer; used only to derive gammas.
inline std::uint64_t mix_murmur64(std::uint64_t z) {
    z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
    z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ULL;
    return z ^ (z >> 33);
}

// Odd increment with enough bit transitions to avoid weak gammas.
inline std::uint64_t mix_gamma(std::uint64_t z) {
    z = mix_murmur64(z) | 1ULL;
    if (std::popcount(z ^ (z >> 1)) < 24) {
        z ^= 0xaaaaaaaaaaaaaaaaULL;
    }
    return z;
}

}  // namespace detail

class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t substream = 0) {
        const std::uint64_t base =
            detail::mix_murmur64(seed) + substream * detail::kGoldenGamma;
        state_ = detail::mix_stafford13(base);
        gamma_ = detail::mix_gamma(base + detail::kGoldenGamma);
    }

    std::uint64_t next_u64() {
        state_ += gamma_;
        return detail::mix_stafford13(state_);
    }

    /// Uniform double in [0, 1) on the 2^-53 grid.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in (-1, 1] on the 2^-52 grid. Every grid point m has
    /// m -/+ 1 exactly representable, which keeps the half-period shift of
    /// the pair coordinate free of rounding.
    double next_symmetric() {
        const double k = static_cast<double>((next_u64() >> 11) + 1);
        return k * 0x1.0p-52 - 1.0;
    }

private:
    std::uint64_t state_;
    std::uint64_t gamma_;
};

}  // namespace isolato
