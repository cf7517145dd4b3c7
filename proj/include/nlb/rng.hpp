#pragma once

#include <cstdint>

namespace nlb {

/**
 * Counter-based random stream.
 *
 * The n-th draw is a pure function of (key, n): a SplitMix64 finalizer applied
 * to key + n * golden-ratio increment. Streams are split by hashing a stream
 * index into a fresh key, so independent sub-streams can be handed to parallel
 * workers without sharing state.
 */
class RngState {
public:
    constexpr RngState() = default;
    explicit constexpr RngState(std::uint64_t seed) : key_(seed) {}

    std::uint64_t next_u64();

    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform();

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi);

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n);

    /// Independent stream derived from this one's key and the given index.
    RngState split(std::uint64_t stream) const;

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t counter() const noexcept { return counter_; }

    friend bool operator==(const RngState&, const RngState&) = default;

private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

} // namespace nlb
