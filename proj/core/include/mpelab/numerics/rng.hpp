#pragma once

#include <array>
#include <cstdint>

namespace mpelab::numerics {

// Philox4x32-10 (Salmon et al., SC'11). The output is a pure function of (key, counter),
// so any draw can be reproduced from its coordinates without replaying a sequence.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

// A substream addressed by (seed, stream). Draws are indexed by an internal
// 64-bit position, so two streams with the same address produce identical values.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream, bool antithetic = false)
        : seed_(seed), stream_(stream), reflect_(antithetic) {}

    std::uint64_t next_u64();
    double uniform();             // in (0, 1), never 0 or 1; reflected to 1 - u when antithetic
    double normal();              // standard normal via inverse CDF
    std::uint64_t position() const { return pos_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    bool reflect_;
    std::uint64_t pos_ = 0;       // index of the next 128-bit block
    std::array<std::uint32_t, 4> block_{};
    int used_ = 2;                // 64-bit words consumed from block_
};

// Named substream purposes so different stochastic steps never share draws.
enum class Purpose : std::uint64_t {
    policy = 1,
    report = 2,
    allocation = 3,
    noise = 4,
    latent = 5,
    instrument = 6,
    covariate = 7,
    auxiliary = 8,
};

inline std::uint64_t stream_id(std::uint64_t agent, Purpose p)
{
    return (agent << 4) | static_cast<std::uint64_t>(p);
}

} // namespace mpelab::numerics
