#pragma once

#include <cstdint>
#include <limits>

namespace substoch {

/// SplitMix64 (Steele, Lea & Flood), used as a counter-based generator: the
/// k-th output (k = 1, 2, ...) is mix(seed + k * 0x9e3779b97f4a7c15). This is
/// the single RNG of the library; every random instance and every walk is a
/// pure function of (seed, counter), so other implementations can reproduce
/// instances bit for bit.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept
    {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Seed of an independent child stream, e.g. (run seed, trial index).
    static constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) noexcept
    {
        return mix(seed ^ mix(stream + kGamma));
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept
    {
        state_ += kGamma;
        return mix(state_);
    }

    /// Unbiased integer in [0, bound) by rejection; bound must be > 0.
    constexpr std::uint64_t below(std::uint64_t bound) noexcept
    {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = (*this)();
            if (r >= threshold) {
                return r % bound;
            }
        }
    }

    /// Double in [0, 1) from the top 53 bits.
    constexpr double uniform01() noexcept
    {
        return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

} // namespace substoch
