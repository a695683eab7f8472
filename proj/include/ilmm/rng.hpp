#pragma once

#include <array>
#include <cstdint>

#include "ilmm/normal.hpp"

namespace ilmm {

/// Philox4x32-10 counter-based generator (Salmon et al., 2011).
///
/// Stateless: each (key, counter) pair maps to four independent 32-bit words,
/// so draws indexed by (seed, path, step, factor) are reproducible regardless
/// of thread scheduling.
struct Philox4x32 {
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::uint64_t key,
                                              std::array<std::uint32_t, 4> ctr) {
        std::uint32_t k0 = static_cast<std::uint32_t>(key);
        std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
            k0 += kWeyl0;
            k1 += kWeyl1;
        }
        return ctr;
    }
};

/// Two uniforms in (0,1) from one Philox block, then inverse-CDF normals.
/// `call` distinguishes multiple draws at the same (path, step).
inline void normal_pair(std::uint64_t seed, std::uint64_t path, std::uint32_t step,
                        std::uint32_t call, double& z0, double& z1) {
    const auto w = Philox4x32::block(
        seed, {static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32), step, call});
    const std::uint64_t a = (static_cast<std::uint64_t>(w[0]) << 32) | w[1];
    const std::uint64_t b = (static_cast<std::uint64_t>(w[2]) << 32) | w[3];
    // (0,1) strictly: offset by half an ulp of the 53-bit lattice
    const double u0 = (static_cast<double>(a >> 11) + 0.5) * 0x1.0p-53;
    const double u1 = (static_cast<double>(b >> 11) + 0.5) * 0x1.0p-53;
    z0 = norm_inv(u0);
    z1 = norm_inv(u1);
}

}  // namespace ilmm
