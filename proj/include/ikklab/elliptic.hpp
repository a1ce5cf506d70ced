// Periodic weighted elliptic solve d_x( w(x) d_x psi ) = f with mean-zero
// gauge, by second-order finite differences and a direct tridiagonal solve
// (one unknown pinned, compatibility enforced by de-meaning f).
#pragma once

#include "field.hpp"

#include <vector>

namespace ikklab {

struct EllipticSolution {
    Field psi;           // mean-zero
    double residual = 0.0; // max-norm residual of the discrete equation
};

inline EllipticSolution weighted_periodic_solve(const Field& weight, const Field& rhs) {
    detail::require_same_grid(weight, rhs, "weighted_periodic_solve");
    const int n = weight.n_points();
    const double h = 1.0 / double(n);

    for (double w : weight.values)
        if (!(w > 0.0)) throw std::invalid_argument("weighted_periodic_solve: weight must be positive");

    // half-point weights w_{j+1/2}
    std::vector<double> wh(size_t(n), 0.0);
    for (int j = 0; j < n; ++j) wh[size_t(j)] = 0.5 * (weight[j] + weight[(j + 1) % n]);

    // compatibility: the discrete mean of f must vanish
    std::vector<double> f(size_t(n), 0.0);
    double fm = mean(rhs);
    for (int j = 0; j < n; ++j) f[size_t(j)] = rhs[j] - fm;

    // pin psi_{n-1} = 0; rows j = 0..n-2 are tridiagonal in psi_0..psi_{n-2}
    const int m = n - 1;
    std::vector<double> lower(size_t(m), 0.0), diag(size_t(m), 0.0), upper(size_t(m), 0.0), b(size_t(m), 0.0);
    const double h2 = h * h;
    for (int j = 0; j < m; ++j) {
        const double wl = wh[size_t((j - 1 + n) % n)];
        const double wr = wh[size_t(j)];
        diag[size_t(j)] = -(wl + wr) / h2;
        if (j > 0) lower[size_t(j)] = wl / h2;
        if (j < m - 1) upper[size_t(j)] = wr / h2;
        b[size_t(j)] = f[size_t(j)];
    }

    // Thomas
    for (int j = 1; j < m; ++j) {
        const double c = lower[size_t(j)] / diag[size_t(j - 1)];
        diag[size_t(j)] -= c * upper[size_t(j - 1)];
        b[size_t(j)] -= c * b[size_t(j - 1)];
    }
    std::vector<double> psi(size_t(n), 0.0);
    psi[size_t(m - 1)] = b[size_t(m - 1)] / diag[size_t(m - 1)];
    for (int j = m - 2; j >= 0; --j)
        psi[size_t(j)] = (b[size_t(j)] - upper[size_t(j)] * psi[size_t(j + 1)]) / diag[size_t(j)];
    psi[size_t(n - 1)] = 0.0;

    EllipticSolution out;
    out.psi.values = std::move(psi);
    const double pm = mean(out.psi);
    for (auto& v : out.psi.values) v -= pm;

    double scale = 0.0;
    for (double v : f) scale = std::max(scale, std::abs(v));
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
        const double wl = wh[size_t((j - 1 + n) % n)];
        const double wr = wh[size_t(j)];
        const double lap = (wr * (out.psi[(j + 1) % n] - out.psi[j]) -
                            wl * (out.psi[j] - out.psi[(j - 1 + n) % n])) / h2;
        worst = std::max(worst, std::abs(lap - f[size_t(j)]));
    }
    out.residual = worst / std::max(scale, 1e-300);
    return out;
}

} // namespace ikklab
