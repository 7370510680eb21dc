#include "mpelab/numerics/rng.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <cmath>

namespace mpelab::numerics {

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key)
{
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * ctr[2];
        const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
        const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += W0;
        key[1] += W1;
    }
    return ctr;
}

std::uint64_t CounterRng::next_u64()
{
    if (used_ == 2) {
        const std::array<std::uint32_t, 4> ctr{static_cast<std::uint32_t>(pos_), static_cast<std::uint32_t>(pos_ >> 32),
                                               static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
        const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
        block_ = philox4x32(ctr, key);
        ++pos_;
        used_ = 0;
    }
    const int i = 2 * used_++;
    return (static_cast<std::uint64_t>(block_[i]) << 32) | block_[i + 1];
}

double CounterRng::uniform()
{
    // 52 random bits centred in their cell, (k + 0.5) / 2^52: exact, symmetric under u -> 1 - u.
    const std::uint64_t k = next_u64() >> 12;
    const double u = (static_cast<double>(k) + 0.5) * 0x1.0p-52;
    return reflect_ ? 1.0 - u : u;
}

double CounterRng::normal()
{
    const double u = uniform();
    return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u);
}

} // namespace mpelab::numerics
