#pragma once

#include <cstdint>
#include <limits>

namespace bwd {

/*
SplitMix64 stream. The whole generator state is one 64-bit word, which makes
the stream position trivially persistable and streams cheap to split: a child
stream is seeded from a mix of the parent seed and a tag.

Satisfies UniformRandomBitGenerator so it can drive <random> distributions.
*/
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0) noexcept : state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        state_ += kGamma;
        return mix(state_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) noexcept { return uniform() < p; }

    /// Independent child stream; does not advance this stream.
    Rng split(std::uint64_t tag) const noexcept { return Rng(derive(state_, tag)); }

    std::uint64_t state() const noexcept { return state_; }

    /// Deterministic seed for sub-stream `tag` of `seed`.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) noexcept {
        return mix(mix(seed ^ 0x6a09e667f3bcc909ULL) + tag * kGamma + 0x3c6ef372fe94f82bULL);
    }

    static std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    friend bool operator==(const Rng&, const Rng&) = default;

private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
    std::uint64_t state_;
};

} // namespace bwd
