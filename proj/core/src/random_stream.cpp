#include "spsc/random_stream.hpp"

#include <array>
#include <stdexcept>

namespace spsc {

namespace {

std::mt19937_64 make_engine(std::uint64_t master_seed, std::uint64_t stream_id) {
    std::array<std::uint32_t, 4> key{
        static_cast<std::uint32_t>(master_seed),
        static_cast<std::uint32_t>(master_seed >> 32),
        static_cast<std::uint32_t>(stream_id),
        static_cast<std::uint32_t>(stream_id >> 32),
    };
    std::seed_seq seq(key.begin(), key.end());
    return std::mt19937_64(seq);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_seed_(master_seed), stream_id_(stream_id), engine_(make_engine(master_seed, stream_id)) {}

std::uint64_t RandomStream::uniform_index(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_index: bound must be positive");
    // Rejection on the top of the range keeps the draw exactly uniform.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % bound;
}

}  // namespace spsc
