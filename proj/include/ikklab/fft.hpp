// Radix-2 complex FFT for power-of-two grids. Self-contained so the spectral
// core stays header-only and safe to call from any thread.
#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

namespace ikklab {

using cplx = std::complex<double>;

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Precomputed twiddle factors and bit-reversal permutation for one size.
class FftPlan {
public:
    explicit FftPlan(int n) : n_(n) {
        if (!is_power_of_two(n)) throw std::invalid_argument("FftPlan: size must be a power of two");
        bitrev_.resize(n);
        int log2n = 0;
        while ((1 << log2n) < n) ++log2n;
        for (int i = 0; i < n; ++i) {
            int r = 0;
            for (int b = 0; b < log2n; ++b)
                if (i & (1 << b)) r |= 1 << (log2n - 1 - b);
            bitrev_[i] = r;
        }
        twiddle_fwd_.resize(n / 2);
        twiddle_inv_.resize(n / 2);
        const double two_pi = 6.283185307179586476925286766559;
        for (int i = 0; i < n / 2; ++i) {
            double ang = -two_pi * double(i) / double(n);
            twiddle_fwd_[i] = cplx(std::cos(ang), std::sin(ang));
            twiddle_inv_[i] = std::conj(twiddle_fwd_[i]);
        }
    }

    int size() const { return n_; }

    // In-place transform. sign=-1: forward kernel e^{-2pi i jk/N}; sign=+1: inverse
    // kernel (no 1/N normalization applied here).
    void transform(cplx* data, int sign) const {
        const int n = n_;
        const cplx* tw = sign > 0 ? twiddle_inv_.data() : twiddle_fwd_.data();
        for (int i = 0; i < n; ++i) {
            int j = bitrev_[i];
            if (j > i) std::swap(data[i], data[j]);
        }
        for (int len = 2; len <= n; len <<= 1) {
            const int half = len >> 1;
            const int step = n / len;
            for (int start = 0; start < n; start += len) {
                for (int i = 0; i < half; ++i) {
                    const cplx w = tw[size_t(i * step)];
                    cplx u = data[start + i];
                    cplx v = data[start + i + half] * w;
                    data[start + i] = u + v;
                    data[start + i + half] = u - v;
                }
            }
        }
    }

private:
    int n_;
    std::vector<int> bitrev_;
    std::vector<cplx> twiddle_fwd_, twiddle_inv_;
};

// Per-thread plan cache; plans are immutable once built.
inline const FftPlan& fft_plan(int n) {
    thread_local std::map<int, std::unique_ptr<FftPlan>> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, std::make_unique<FftPlan>(n)).first;
    return *it->second;
}

} // namespace ikklab
