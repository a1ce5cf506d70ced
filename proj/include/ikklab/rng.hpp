// Counter-based Gaussian draws (Philox4x32-10). A draw is a pure function of
// (seed, replicate, mode, step), which is what lets coupled-noise experiments
// reuse identical Brownian increments across parameter grids without storing
// paths.
#pragma once

#include <cmath>
#include <cstdint>

namespace ikklab {

namespace philox {

struct U4 {
    uint32_t v[4];
};

inline void round_once(U4& ctr, uint32_t& k0, uint32_t& k1) {
    constexpr uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    const uint64_t p0 = uint64_t(M0) * ctr.v[0];
    const uint64_t p1 = uint64_t(M1) * ctr.v[2];
    U4 out;
    out.v[0] = uint32_t(p1 >> 32) ^ ctr.v[1] ^ k0;
    out.v[1] = uint32_t(p1);
    out.v[2] = uint32_t(p0 >> 32) ^ ctr.v[3] ^ k1;
    out.v[3] = uint32_t(p0);
    ctr = out;
    k0 += 0x9E3779B9u;
    k1 += 0xBB67AE85u;
}

inline U4 philox4x32_10(U4 ctr, uint32_t k0, uint32_t k1) {
    for (int r = 0; r < 10; ++r) round_once(ctr, k0, k1);
    return ctr;
}

} // namespace philox

namespace detail_rng {

inline void box_muller(uint64_t seed, uint32_t replicate, uint32_t mode, uint64_t step,
                       double& g1, double& g2) {
    philox::U4 ctr{{uint32_t(step), uint32_t(step >> 32), mode, replicate}};
    philox::U4 r = philox::philox4x32_10(ctr, uint32_t(seed), uint32_t(seed >> 32));
    const uint64_t a = (uint64_t(r.v[0]) << 32) | r.v[1];
    const uint64_t b = (uint64_t(r.v[2]) << 32) | r.v[3];
    const double u1 = (double(a >> 11) + 1.0) * 0x1.0p-53; // (0, 1]
    const double u2 = double(b >> 11) * 0x1.0p-53;         // [0, 1)
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586 * u2;
    g1 = radius * std::cos(angle);
    g2 = radius * std::sin(angle);
}

} // namespace detail_rng

// Standard normal keyed by the full coordinate tuple; bit-reproducible. Modes
// 2k-1 and 2k (the cosine/sine pair of frequency k) share one counter-based
// block, so a frequency pair costs a single Philox evaluation.
inline double gaussian_draw(uint64_t seed, uint32_t replicate, uint32_t mode, uint64_t step) {
    double g1 = 0.0, g2 = 0.0;
    if (mode == 0) {
        detail_rng::box_muller(seed, replicate, 0, step, g1, g2);
        return g1;
    }
    const uint32_t k = (mode + 1) / 2;
    detail_rng::box_muller(seed, replicate, k, step, g1, g2);
    return (mode % 2 == 1) ? g1 : g2;
}

// Both draws of the frequency-k pair (modes 2k-1 and 2k) at once.
inline void gaussian_pair(uint64_t seed, uint32_t replicate, uint32_t k, uint64_t step, double& gc,
                          double& gs) {
    detail_rng::box_muller(seed, replicate, k, step, gc, gs);
}

} // namespace ikklab
