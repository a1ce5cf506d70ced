// Kac interaction kernels: smooth compactly supported even bumps, their
// gamma-rescalings J_{gamma^{1/3}}(x) = gamma^{-1/3} J(gamma^{-1/3} x),
// grid moments, and the Taylor-defect field behind the remainder R3.
#pragma once

#include "field.hpp"

#include <cmath>
#include <sstream>

namespace ikklab {

// Analytic profile: x -> exp(-1/(1 - (x/r)^2)) on |x| < r, zero outside.
struct BumpDescriptor {
    double base_radius = 0.25;
    double scale = 1.0; // support radius = scale * base_radius
};

inline double bump_profile(double x, double radius) {
    const double t = x / radius;
    const double d = 1.0 - t * t;
    if (d <= 0.0) return 0.0;
    return std::exp(-1.0 / d);
}

struct Kernel {
    Field samples;        // unit discrete mass
    double support_radius = 0.0;
    BumpDescriptor analytic;
};

namespace detail {

inline Kernel sampled_bump(double base_radius, double scale, int n) {
    const double radius = base_radius * scale;
    Field f(n);
    for (int j = 0; j < n; ++j) {
        const double x = Field::node(j, n);
        f[j] = bump_profile(x / scale, base_radius) / scale;
    }
    double m = mean(f); // = (1/N) sum = grid quadrature of the mass
    if (m <= 0.0) throw std::runtime_error("bump kernel: vanishing mass on grid");
    for (auto& v : f.values) v /= m;
    Kernel k;
    k.samples = std::move(f);
    k.support_radius = radius;
    k.analytic = BumpDescriptor{base_radius, scale};
    return k;
}

} // namespace detail

inline Kernel make_bump_kernel(double radius, int n) {
    if (!(radius > 0.0 && radius < 0.5))
        throw std::invalid_argument("make_bump_kernel: radius must lie in (0, 1/2)");
    detail::require_grid(n, "make_bump_kernel");
    return detail::sampled_bump(radius, 1.0, n);
}

// J_{gamma^{1/3}} resampled from the analytic profile. Refuses kernels whose
// rescaled support radius covers fewer than 4 grid cells; the gamma-to-0
// experiments must fail loudly instead of aliasing.
inline Kernel rescale(const Kernel& j, double gamma) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("rescale: gamma must lie in (0, 1]");
    const int n = j.samples.n_points();
    const double scale = j.analytic.scale * std::cbrt(gamma);
    const double radius = j.analytic.base_radius * scale;
    if (radius < 4.0 / double(n)) {
        int need = int(std::ceil(4.0 / radius));
        int need_pow2 = 8;
        while (need_pow2 < need) need_pow2 <<= 1;
        std::ostringstream os;
        os << "rescale: kernel support radius " << radius << " under-resolved at N=" << n
           << "; need N >= " << need_pow2;
        throw std::invalid_argument(os.str());
    }
    return detail::sampled_bump(j.analytic.base_radius, scale, n);
}

// int J(x) |x|^p dx by grid quadrature, p in 0..4.
inline double moment(const Kernel& j, int p) {
    if (p < 0 || p > 4) throw std::invalid_argument("moment: p must lie in 0..4");
    const int n = j.samples.n_points();
    double acc = 0.0;
    for (int jj = 0; jj < n; ++jj) {
        const double x = Field::node(jj, n);
        acc += j.samples[jj] * std::pow(std::abs(x), p);
    }
    return acc / double(n);
}

struct TaylorDefect {
    Field defect;
    bool resolved = true;
};

// J_gamma * d_x f - d_x f - gamma^{2/3} (D/2) d_xxx f. For spectrally resolved f
// the L1 size is set by the fourth kernel moment, O(gamma^{4/3}).
inline TaylorDefect taylor_defect(const Kernel& j_gamma, const Field& f, double gamma, double d_coeff) {
    detail::require_same_grid(j_gamma.samples, f, "taylor_defect");
    Spectrum sf = to_spectrum(f);
    Spectrum sj = to_spectrum(j_gamma.samples);
    const int n = sf.n_points();

    // resolution check: top-third coefficient magnitudes below 1e-8 of the peak
    double peak = 0.0, tail = 0.0;
    for (int i = 0; i < n; ++i) {
        const int k = std::abs(Spectrum::wavenumber_of_slot(i, n));
        const double a = std::abs(sf.coeff[size_t(i)]);
        peak = std::max(peak, a);
        if (k > n / 3) tail = std::max(tail, a);
    }
    TaylorDefect out;
    out.resolved = peak == 0.0 || tail <= 1e-8 * peak;

    const double gpow = std::cbrt(gamma) * std::cbrt(gamma); // gamma^{2/3}
    Spectrum sd(n);
    for (int i = 0; i < n; ++i) {
        const int k = Spectrum::wavenumber_of_slot(i, n);
        const cplx ik(0.0, two_pi * k);
        const cplx conv_sym = sj.coeff[size_t(i)] * ik;        // J * d_x f
        const cplx taylor_sym = ik + gpow * 0.5 * d_coeff * ik * ik * ik;
        sd.coeff[size_t(i)] = (conv_sym - taylor_sym) * sf.coeff[size_t(i)];
    }
    sd.coeff[size_t(n / 2)] = 0.0;
    out.defect = from_spectrum(sd);
    return out;
}

} // namespace ikklab
