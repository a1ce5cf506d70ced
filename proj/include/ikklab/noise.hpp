// Fourier-mode construction of the driving noises. The abstract basis
// (e_k)_{k>=0} is realized as the real trigonometric system
//   mode 0      -> 1
//   mode 2k-1   -> sqrt(2) cos(2 pi k x)
//   mode 2k     -> sqrt(2) sin(2 pi k x),   k = 1..K
// so that f_{delta,m} = eta_delta * e_m picks up the real multiplier
// eta_hat_delta(k), and the coefficient fields F1, F3 are spatial constants
// while F2 vanishes identically.
#pragma once

#include "kernel.hpp"
#include "rng.hpp"

#include <cmath>
#include <vector>

namespace ikklab {

struct MollifierSpec {
    double delta = 0.1;
    double base_radius = 0.25;
    Kernel eta_delta; // delta^{-1/3} eta(x / delta^{1/3}), unit mass on the grid

    static MollifierSpec make(double delta, double base_radius, int n) {
        if (!(delta > 0.0)) throw std::invalid_argument("MollifierSpec: delta must be positive");
        Kernel base = make_bump_kernel(base_radius, n);
        MollifierSpec spec;
        spec.delta = delta;
        spec.base_radius = base_radius;
        const double scale = std::cbrt(delta);
        const double radius = base_radius * scale;
        if (radius < 4.0 / double(n)) {
            std::ostringstream os;
            os << "MollifierSpec: eta_delta support radius " << radius
               << " under-resolved at N=" << n;
            throw std::invalid_argument(os.str());
        }
        spec.eta_delta = detail::sampled_bump(base_radius, scale, n);
        return spec;
    }
};

// eta_hat_delta(k) for k = 0..K (real; the mollifier is even).
inline std::vector<double> mode_multipliers(const MollifierSpec& spec, int k_max) {
    const int n = spec.eta_delta.samples.n_points();
    if (k_max > n / 2) throw std::invalid_argument("mode_multipliers: K exceeds N/2");
    Spectrum s = to_spectrum(spec.eta_delta.samples);
    std::vector<double> mult(size_t(k_max) + 1);
    for (int k = 0; k <= k_max; ++k) mult[size_t(k)] = s.at_wavenumber(k).real();
    return mult;
}

struct NoiseCoefficients {
    double F1 = 0.0;
    Field F2;
    double F3 = 0.0;
    int truncation = 0;
    double F1_spread = 0.0; // max-min of the sampled F1 field, diagnostics
    double F3_spread = 0.0;
};

// F1 = sum |f_{delta,m}|^2, F2 = (1/2) sum d_x f^2, F3 = sum |d_x f|^2,
// computed from the sampled basis fields rather than the closed forms so the
// constancy claims are observable.
inline NoiseCoefficients coefficients(const MollifierSpec& spec, int k_max) {
    const int n = spec.eta_delta.samples.n_points();
    const auto mult = mode_multipliers(spec, k_max);
    Field f1(n), f3(n), sum_sq(n);
    const double rt2 = std::sqrt(2.0);
    for (int k = 0; k <= k_max; ++k) {
        const double amp = (k == 0) ? 1.0 : rt2;
        const double w = two_pi * k;
        for (int j = 0; j < n; ++j) {
            const double x = Field::node(j, n);
            const double c = amp * std::cos(w * x) * mult[size_t(k)];
            const double s = amp * std::sin(w * x) * mult[size_t(k)];
            if (k == 0) {
                f1[j] += c * c;
                sum_sq[j] += c * c;
            } else {
                f1[j] += c * c + s * s;
                sum_sq[j] += c * c + s * s;
                const double dc = -w * amp * std::sin(w * x) * mult[size_t(k)];
                const double ds = w * amp * std::cos(w * x) * mult[size_t(k)];
                f3[j] += dc * dc + ds * ds;
            }
        }
    }
    NoiseCoefficients out;
    out.truncation = k_max;
    auto span = [](const Field& f) {
        double lo = f[0], hi = f[0];
        for (double v : f.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        return std::pair<double, double>(lo, hi);
    };
    auto [lo1, hi1] = span(f1);
    auto [lo3, hi3] = span(f3);
    out.F1 = mean(f1);
    out.F3 = mean(f3);
    out.F1_spread = hi1 - lo1;
    out.F3_spread = hi3 - lo3;
    out.F2 = 0.5 * derivative(sum_sq, 1);
    return out;
}

// Value-type handle on the Brownian family: increments are pure functions of
// (seed, replicate, mode, step).
struct NoiseStream {
    uint64_t seed = 0;
    uint32_t replicate = 0;
    bool force_zero = false; // test hook

    double gauss(uint32_t mode, uint64_t step) const {
        if (force_zero) return 0.0;
        return gaussian_draw(seed, replicate, mode, step);
    }

    // cosine/sine pair of frequency k (modes 2k-1 and 2k) in one draw
    void gauss_pair(uint32_t k, uint64_t step, double& gc, double& gs) const {
        if (force_zero) {
            gc = gs = 0.0;
            return;
        }
        gaussian_pair(seed, replicate, k, step, gc, gs);
    }
};

// Spectrum of sum_{k<=K} mult_k e_k dB_k for one step, with dB ~ N(0, dt).
// mult = per-frequency multipliers indexed 0..K (pass all-ones for white noise).
inline void increment_spectrum_into(const NoiseStream& stream, const std::vector<double>& mult,
                                    int n, double dt, uint64_t step, cplx* out) {
    std::fill(out, out + n, cplx(0.0, 0.0));
    const int k_max = int(mult.size()) - 1;
    const double sdt = std::sqrt(dt);
    const double half_rt2 = std::sqrt(2.0) / 2.0;
    out[0] = mult[0] * sdt * stream.gauss(0, step);
    for (int k = 1; k <= k_max; ++k) {
        double gc = 0.0, gs = 0.0;
        stream.gauss_pair(uint32_t(k), step, gc, gs);
        // a*sqrt2 cos + b*sqrt2 sin has c_k = (sqrt2/2)(a - i b)
        const cplx ck = half_rt2 * mult[size_t(k)] * sdt * cplx(gc, -gs);
        out[size_t(Spectrum::slot_of_wavenumber(k, n))] = ck;
        out[size_t(Spectrum::slot_of_wavenumber(-k, n))] = std::conj(ck);
    }
}

inline Spectrum increment_spectrum(const NoiseStream& stream, const std::vector<double>& mult,
                                   int n, double dt, uint64_t step) {
    Spectrum s(n);
    increment_spectrum_into(stream, mult, n, dt, step, s.coeff.data());
    return s;
}

inline Field sample_correlated_increment(const NoiseStream& stream, const MollifierSpec& spec,
                                         int k_max, double dt, uint64_t step) {
    if (!(dt > 0.0)) throw std::invalid_argument("sample_correlated_increment: dt must be positive");
    const int n = spec.eta_delta.samples.n_points();
    return from_spectrum(increment_spectrum(stream, mode_multipliers(spec, k_max), n, dt, step));
}

inline Field sample_white_increment(const NoiseStream& stream, int n, int k_max, double dt,
                                    uint64_t step) {
    if (!(dt > 0.0)) throw std::invalid_argument("sample_white_increment: dt must be positive");
    if (k_max > n / 2) throw std::invalid_argument("sample_white_increment: K exceeds N/2");
    std::vector<double> ones(size_t(k_max) + 1, 1.0);
    return from_spectrum(increment_spectrum(stream, ones, n, dt, step));
}

} // namespace ikklab
