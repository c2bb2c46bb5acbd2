// Counter-based pseudo-random numbers (SplitMix64 in stateless form).
//
// Every random decision in the tool is derived from an explicit 64-bit seed.
// Sub-streams are split off a master seed by label, so stages (profiling,
// trigger sampling, detection, ...) draw from independent reproducible
// streams: sub_seed = mix64(master ^ fnv1a64(label)).

#pragma once

#include <cstdint>
#include <string_view>

namespace hwt::rng {

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Value of stream `seed` at position `index`; O(1), any position addressable.
constexpr std::uint64_t at(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed + (index + 1) * kGamma);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

constexpr std::uint64_t sub_seed(std::uint64_t master, std::string_view label) {
    return mix64(master ^ fnv1a64(label));
}

// Sequential view over a counter stream.
class Stream {
  public:
    explicit Stream(std::uint64_t seed) : seed_(seed) {}
    Stream(std::uint64_t master, std::string_view label) : seed_(sub_seed(master, label)) {}

    std::uint64_t next_u64() { return at(seed_, counter_++); }

    bool next_bit() { return (next_u64() & 1ull) != 0; }

    // Uniform in [0, n); exact (rejection sampling). Always consumes at
    // least one draw, so stream positions do not depend on n.
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t bound = (~0ull) - ((~0ull) % n + 1) % n;
        std::uint64_t x = next_u64();
        while (x > bound) x = next_u64();
        return x % n;
    }

    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    std::uint64_t seed() const { return seed_; }

  private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

}  // namespace hwt::rng
