#include "quanto/random.hpp"

namespace quanto {

namespace {

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t substream) {
    std::seed_seq seq{
        static_cast<std::uint32_t>(seed & 0xffffffffu),
        static_cast<std::uint32_t>(seed >> 32),
        static_cast<std::uint32_t>(substream & 0xffffffffu),
        static_cast<std::uint32_t>(substream >> 32),
    };
    return std::mt19937_64(seq);
}

} // namespace

RandomStream::RandomStream(std::uint64_t seed) : RandomStream(seed, 0) {}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t substream)
    : engine_(seeded_engine(seed, substream)) {}

} // namespace quanto
