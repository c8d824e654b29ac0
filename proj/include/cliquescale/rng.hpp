#pragma once

#include <cstdint>
#include <limits>

namespace cliquescale {

/// Roles used to derive independent substreams from one user seed.
enum class StreamRole : std::uint64_t {
    NodeWeight = 1,
    EdgeRow = 2,
    SkipRow = 3,
    MonteCarloBlock = 4,
    SimplexBlock = 5,
    Replica = 6,
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Key for the substream (seed, role, index). Any two distinct triples give
/// unrelated keys, so rows / blocks can be generated in any order or thread.
inline constexpr std::uint64_t derive_key(std::uint64_t seed, StreamRole role,
                                          std::uint64_t index) noexcept {
    std::uint64_t k = splitmix64(seed);
    k = splitmix64(k ^ (static_cast<std::uint64_t>(role) * 0xD1B54A32D192ED03ULL));
    return splitmix64(k ^ (index * 0xA24BAED4963EE407ULL + 0x632BE59BD9B4E019ULL));
}

/// Counter-based SplitMix64 stream. Satisfies UniformRandomBitGenerator.
class Stream {
public:
    using result_type = std::uint64_t;

    constexpr explicit Stream(std::uint64_t key) noexcept : state_(key) {}
    Stream(std::uint64_t seed, StreamRole role, std::uint64_t index) noexcept
        : state_(derive_key(seed, role, index)) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform on [0, 1).
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1].
    double uniform_open_closed() noexcept {
        return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

}  // namespace cliquescale
