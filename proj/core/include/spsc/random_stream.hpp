#pragma once

#include <cstdint>
#include <random>

namespace spsc {

/// Deterministic random stream keyed by (master_seed, stream_id).
///
/// The generator is a 64-bit Mersenne Twister seeded through std::seed_seq
/// with the four 32-bit halves of the key, so distinct stream ids give
/// decorrelated sequences and equal keys give identical ones on every
/// platform. Draw helpers avoid the standard distributions, whose output is
/// implementation-defined.
class RandomStream {
public:
    RandomStream(std::uint64_t master_seed, std::uint64_t stream_id);

    std::uint64_t master_seed() const noexcept { return master_seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound). bound must be positive.
    std::uint64_t uniform_index(std::uint64_t bound);

    bool bernoulli(double p) { return uniform01() < p; }

    friend bool operator==(const RandomStream& a, const RandomStream& b) {
        return a.master_seed_ == b.master_seed_ && a.stream_id_ == b.stream_id_ &&
               a.engine_ == b.engine_;
    }

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; used to derive child seeds from a master seed.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
    return mix64(mix64(master_seed) ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

}  // namespace spsc
