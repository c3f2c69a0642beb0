#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace tabf {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A block is
// a pure function of (counter, key), so any (seed, replica, step) address
// yields the same stream regardless of execution order or thread count.
namespace philox {

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline std::array<std::uint32_t, 4> round_once(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(0xD2511F53u, ctr[0], hi0, lo0);
    mulhilo(0xCD9E8D57u, ctr[2], hi1, lo1);
    return {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

inline std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                          std::array<std::uint32_t, 2> key) {
    ctr = round_once(ctr, key);
    for (int r = 1; r < 10; ++r) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
        ctr = round_once(ctr, key);
    }
    return ctr;
}

}  // namespace philox

// Uniform double in [0, 1) from two 32-bit words (53 mantissa bits).
inline double uniform_from_words(std::uint32_t a, std::uint32_t b) {
    std::uint64_t u = (static_cast<std::uint64_t>(a) << 32) | b;
    return static_cast<double>(u >> 11) * 0x1.0p-53;
}

struct NormalPair {
    double z0;
    double z1;
};

// Two independent standard normals addressed by (seed, replica, step, pair).
inline NormalPair counter_normals(std::uint64_t seed, std::uint32_t replica, std::uint64_t step,
                                  std::uint32_t pair_index) {
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                              static_cast<std::uint32_t>(seed >> 32)};
    const std::array<std::uint32_t, 4> ctr = {static_cast<std::uint32_t>(step),
                                              static_cast<std::uint32_t>(step >> 32), replica,
                                              pair_index};
    const auto out = philox::block(ctr, key);
    // Box-Muller; u1 is shifted into (0, 1] so the log is finite.
    const double u1 = 1.0 - uniform_from_words(out[0], out[1]);
    const double u2 = uniform_from_words(out[2], out[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

// Uniform [0,1) draw on the same addressing scheme (used for initial
// replica placement; the step slot is reserved below the sampler's range).
inline double counter_uniform(std::uint64_t seed, std::uint32_t replica, std::uint64_t step,
                              std::uint32_t slot) {
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                              static_cast<std::uint32_t>(seed >> 32)};
    const std::array<std::uint32_t, 4> ctr = {static_cast<std::uint32_t>(step),
                                              static_cast<std::uint32_t>(step >> 32), replica,
                                              slot};
    const auto out = philox::block(ctr, key);
    return uniform_from_words(out[0], out[1]);
}

}  // namespace tabf
