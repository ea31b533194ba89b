#pragma once

#include <cstdint>
#include <limits>

namespace aoi {

/// Stream identifiers used to key counter-based draws. Keeping them fixed
/// couples channel and loss realizations across compared policies.
enum class StreamId : std::uint64_t {
    Channel = 1,
    Success = 2,
    Candidate = 3,
    Subset = 4,
    Generic = 5,
};

inline constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Hash of a key tuple; every draw in the simulator is a pure function of it.
inline constexpr std::uint64_t counter_hash(std::uint64_t seed, StreamId stream, std::uint64_t a,
                                            std::uint64_t b, std::uint64_t counter = 0) noexcept {
    std::uint64_t h = splitmix64(seed ^ 0x6a09e667f3bcc909ULL);
    h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
    h = splitmix64(h ^ a);
    h = splitmix64(h ^ b);
    return splitmix64(h ^ counter);
}

/// Uniform double in [0, 1) from the top 53 bits.
inline constexpr double to_unit(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline constexpr double counter_uniform(std::uint64_t seed, StreamId stream, std::uint64_t a,
                                        std::uint64_t b, std::uint64_t counter = 0) noexcept {
    return to_unit(counter_hash(seed, stream, a, b, counter));
}

/// Counter-based random stream keyed by (seed, stream, a, b). Satisfies
/// UniformRandomBitGenerator so it can drive <random> and <algorithm>.
class RandomStream {
public:
    using result_type = std::uint64_t;

    explicit RandomStream(std::uint64_t seed, StreamId stream = StreamId::Generic, std::uint64_t a = 0,
                          std::uint64_t b = 0) noexcept
        : seed_(seed), stream_(stream), a_(a), b_(b) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept { return counter_hash(seed_, stream_, a_, b_, counter_++); }
    double uniform() noexcept { return to_unit((*this)()); }

    /// Uniform integer in [0, bound) via Lemire's multiply-shift; bound > 0.
    std::uint64_t below(std::uint64_t bound) noexcept {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>((*this)()) * bound) >> 64);
    }

    std::uint64_t draws() const noexcept { return counter_; }

private:
    std::uint64_t seed_;
    StreamId stream_;
    std::uint64_t a_;
    std::uint64_t b_;
    std::uint64_t counter_ = 0;
};

}  // namespace aoi
