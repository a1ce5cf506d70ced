// Periodic grid functions on the unit torus T^1 = [-1/2, 1/2) and their
// Fourier spectra. Conventions used throughout the project:
//   grid nodes      x_j = -1/2 + j/N, j = 0..N-1, N a power of two >= 8
//   Fourier basis   e^{2 pi i k x},  so d/dx maps to 2 pi i k
//   to_spectrum     c_k = (1/N) sum_j f_j e^{-2 pi i k x_j}  (spectrally exact
//                   trapezoid of int f e^{-2 pi i k x} dx for band-limited f)
//   Parseval        int |f|^2 dx = sum_k |c_k|^2
#pragma once

#include "fft.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ikklab {

struct Field {
    std::vector<double> values;

    Field() = default;
    explicit Field(int n, double fill = 0.0) : values(size_t(n), fill) {}

    int n_points() const { return int(values.size()); }
    double& operator[](int j) { return values[size_t(j)]; }
    double operator[](int j) const { return values[size_t(j)]; }

    static double node(int j, int n) { return -0.5 + double(j) / double(n); }

    static Field from_function(int n, const std::function<double(double)>& f) {
        Field out(n);
        for (int j = 0; j < n; ++j) out[j] = f(node(j, n));
        return out;
    }
};

// Complex Fourier coefficients in FFT layout: slot i holds wavenumber
// k = i for i < N/2 and k = i - N otherwise (slot N/2 is the shared Nyquist mode).
struct Spectrum {
    std::vector<cplx> coeff;

    Spectrum() = default;
    explicit Spectrum(int n) : coeff(size_t(n)) {}

    int n_points() const { return int(coeff.size()); }

    static int wavenumber_of_slot(int i, int n) { return i < n / 2 ? i : i - n; }
    static int slot_of_wavenumber(int k, int n) { return k >= 0 ? k : k + n; }

    cplx at_wavenumber(int k) const {
        const int n = n_points();
        if (std::abs(k) > n / 2) throw std::invalid_argument("Spectrum: |k| exceeds Nyquist");
        if (k == -n / 2) k = n / 2; // shared slot
        return coeff[size_t(slot_of_wavenumber(k, n))];
    }
};

namespace detail {

inline void require_grid(int n, const char* where) {
    if (n < 8 || !is_power_of_two(n)) {
        std::ostringstream os;
        os << where << ": grid size " << n << " must be a power of two >= 8";
        throw std::invalid_argument(os.str());
    }
}

inline void require_finite(const Field& f, const char* where) {
    for (int j = 0; j < f.n_points(); ++j) {
        if (!std::isfinite(f[j])) {
            std::ostringstream os;
            os << where << ": non-finite sample " << f[j] << " at index " << j;
            throw std::invalid_argument(os.str());
        }
    }
}

inline void require_same_grid(const Field& a, const Field& b, const char* where) {
    if (a.n_points() != b.n_points()) {
        std::ostringstream os;
        os << where << ": grid mismatch " << a.n_points() << " vs " << b.n_points();
        throw std::invalid_argument(os.str());
    }
}

// Phase (-1)^k accounting for the grid origin at x = -1/2. N even, so the
// parity of the slot index equals the parity of the wavenumber.
inline double origin_phase(int slot) { return (slot & 1) ? -1.0 : 1.0; }

} // namespace detail

inline constexpr double two_pi = 6.283185307179586476925286766559;

inline Spectrum to_spectrum(const Field& f) {
    const int n = f.n_points();
    detail::require_grid(n, "to_spectrum");
    detail::require_finite(f, "to_spectrum");
    Spectrum s(n);
    for (int j = 0; j < n; ++j) s.coeff[size_t(j)] = cplx(f[j], 0.0);
    fft_plan(n).transform(s.coeff.data(), -1);
    const double inv_n = 1.0 / double(n);
    for (int i = 0; i < n; ++i) s.coeff[size_t(i)] *= detail::origin_phase(i) * inv_n;
    return s;
}

inline Field from_spectrum(const Spectrum& s) {
    const int n = s.n_points();
    detail::require_grid(n, "from_spectrum");
    std::vector<cplx> work(s.coeff);
    for (int i = 0; i < n; ++i) work[size_t(i)] *= detail::origin_phase(i);
    fft_plan(n).transform(work.data(), +1);
    Field f(n);
    for (int j = 0; j < n; ++j) f[j] = work[size_t(j)].real();
    return f;
}

inline double mean(const Field& f) {
    double s = 0.0;
    for (double v : f.values) s += v;
    return s / double(f.n_points());
}

// Discrete L^2(T^1) norm, (1/N sum f_j^2)^{1/2}; torus volume is 1.
inline double l2_norm(const Field& f) {
    double s = 0.0;
    for (double v : f.values) s += v * v;
    return std::sqrt(s / double(f.n_points()));
}

inline double linf_norm(const Field& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

inline double l1_norm(const Field& f) {
    double s = 0.0;
    for (double v : f.values) s += std::abs(v);
    return s / double(f.n_points());
}

// Multiply spectrum in place by (2 pi i k)^order. Odd orders zero the Nyquist
// slot (its derivative has no consistent real representative).
inline void apply_derivative_symbol(Spectrum& s, int order) {
    const int n = s.n_points();
    for (int i = 0; i < n; ++i) {
        const int k = Spectrum::wavenumber_of_slot(i, n);
        cplx sym = std::pow(cplx(0.0, two_pi * k), order);
        s.coeff[size_t(i)] *= sym;
    }
    if (order % 2 == 1) s.coeff[size_t(n / 2)] = 0.0;
}

inline Field derivative(const Field& f, int order) {
    if (order < 1 || order > 5) throw std::invalid_argument("derivative: order must be in 1..5");
    Spectrum s = to_spectrum(f);
    apply_derivative_symbol(s, order);
    return from_spectrum(s);
}

// Periodic convolution (f * g)(x) = int f(x-y) g(y) dy; coefficients multiply.
inline Field convolve(const Field& f, const Field& g) {
    detail::require_same_grid(f, g, "convolve");
    Spectrum sf = to_spectrum(f), sg = to_spectrum(g);
    for (int i = 0; i < sf.n_points(); ++i) sf.coeff[size_t(i)] *= sg.coeff[size_t(i)];
    return from_spectrum(sf);
}

// (sum_k (1+(2 pi k)^2)^s |c_k|^2)^{1/2}
inline double sobolev_norm(const Field& f, double s) {
    if (s < -10.0 || s > 10.0) throw std::invalid_argument("sobolev_norm: s must lie in [-10, 10]");
    Spectrum sp = to_spectrum(f);
    const int n = sp.n_points();
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const int k = Spectrum::wavenumber_of_slot(i, n);
        const double w = std::pow(1.0 + (two_pi * k) * (two_pi * k), s);
        acc += w * std::norm(sp.coeff[size_t(i)]);
    }
    return std::sqrt(acc);
}

inline double sobolev_norm(const Spectrum& sp, double s) {
    const int n = sp.n_points();
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const int k = Spectrum::wavenumber_of_slot(i, n);
        const double w = std::pow(1.0 + (two_pi * k) * (two_pi * k), s);
        acc += w * std::norm(sp.coeff[size_t(i)]);
    }
    return std::sqrt(acc);
}

// Mean-zero antiderivative: spectrally c_k / (2 pi i k), c_0 = 0. Input must be
// mean-zero to within 1e-8 * ||f||_L2.
inline Field antiderivative_mean_zero(const Field& f) {
    const double m = mean(f);
    const double scale = l2_norm(f);
    if (std::abs(m) > 1e-8 * std::max(scale, 1e-300)) {
        std::ostringstream os;
        os << "antiderivative_mean_zero: input has mean " << m << " (L2 norm " << scale << ")";
        throw std::invalid_argument(os.str());
    }
    Spectrum s = to_spectrum(f);
    const int n = s.n_points();
    for (int i = 0; i < n; ++i) {
        const int k = Spectrum::wavenumber_of_slot(i, n);
        if (k == 0) {
            s.coeff[size_t(i)] = 0.0;
        } else {
            s.coeff[size_t(i)] /= cplx(0.0, two_pi * k);
        }
    }
    s.coeff[size_t(n / 2)] = 0.0;
    return from_spectrum(s);
}

// 2/3-rule dealiasing: zero all modes with |k| > N/3.
inline void dealias(Spectrum& s) {
    const int n = s.n_points();
    const int kmax = n / 3;
    for (int i = 0; i < n; ++i)
        if (std::abs(Spectrum::wavenumber_of_slot(i, n)) > kmax) s.coeff[size_t(i)] = 0.0;
}

inline Field operator+(const Field& a, const Field& b) {
    detail::require_same_grid(a, b, "Field operator+");
    Field out(a.n_points());
    for (int j = 0; j < a.n_points(); ++j) out[j] = a[j] + b[j];
    return out;
}

inline Field operator-(const Field& a, const Field& b) {
    detail::require_same_grid(a, b, "Field operator-");
    Field out(a.n_points());
    for (int j = 0; j < a.n_points(); ++j) out[j] = a[j] - b[j];
    return out;
}

inline Field operator*(double c, const Field& a) {
    Field out(a.n_points());
    for (int j = 0; j < a.n_points(); ++j) out[j] = c * a[j];
    return out;
}

} // namespace ikklab
