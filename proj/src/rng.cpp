#include "nlb/rng.hpp"

#include <cstdint>

namespace nlb {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace

std::uint64_t RngState::next_u64() {
    ++counter_;
    return mix(key_ + counter_ * kGolden);
}

double RngState::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngState::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

std::uint64_t RngState::below(std::uint64_t n) {
    // Rejection keeps the draw unbiased.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    for (;;) {
        const std::uint64_t x = next_u64();
        if (x < limit) return x % n;
    }
}

RngState RngState::split(std::uint64_t stream) const {
    return RngState(mix(key_ ^ mix(stream + kGolden)) ^ mix(counter_ + 0x632BE59BD9B4E019ULL));
}

} // namespace nlb
