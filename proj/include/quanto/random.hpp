#pragma once

#include <cstdint>
#include <random>

namespace quanto {

/// Caller-owned random stream. Not shared across threads; derive one per worker
/// with the (seed, substream) constructor.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed);
    RandomStream(std::uint64_t seed, std::uint64_t substream);

    double normal() { return normal_(engine_); }

    /// Uniform on [0, 1).
    double uniform() { return uniform_(engine_); }

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

} // namespace quanto
