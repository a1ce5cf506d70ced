// Rescaled entropy Psi_gamma of the spin fluctuation field, its regularized
// variants, the diffusion-coefficient families sigma / sigma_n, and the
// entropy-dissipation diagnostics.
//
//   Psi_gamma(z) = gamma^{-1/3}/2 [ (1+gamma^{1/3} z) log(1+gamma^{1/3} z)
//                                 + (1-gamma^{1/3} z) log(1-gamma^{1/3} z) - 2 ]
// on [-gamma^{-1/3}, gamma^{-1/3}], boundary values by continuum limit.
#pragma once

#include "kernel.hpp"
#include "trajectory.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace ikklab {

struct EntropyParams {
    double gamma = 1.0;
    double reg = 0.0; // regularization delta-bar >= 0; 0 = unregularized

    EntropyParams() = default;
    EntropyParams(double g, double r = 0.0) : gamma(g), reg(r) {
        if (!(gamma > 0.0 && gamma <= 1.0))
            throw std::invalid_argument("EntropyParams: gamma must lie in (0, 1]");
        if (reg < 0.0) throw std::invalid_argument("EntropyParams: regularization must be >= 0");
    }

    double bound() const { return 1.0 / std::cbrt(gamma); } // gamma^{-1/3}
};

namespace detail {

inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

inline void require_admissible(double zeta, const EntropyParams& p, const char* where) {
    const double b = p.bound();
    if (std::abs(zeta) > b * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << where << ": zeta = " << zeta << " outside admissible [-" << b << ", " << b << "]";
        throw std::invalid_argument(os.str());
    }
}

} // namespace detail

inline double entropy_value(double zeta, const EntropyParams& p) {
    detail::require_admissible(zeta, p, "entropy_value");
    const double g3 = std::cbrt(p.gamma);
    const double r = p.reg;
    const double u = 1.0 + r + g3 * zeta;
    const double v = 1.0 + r - g3 * zeta;
    return (detail::xlogx(u) + detail::xlogx(v) - 2.0) / (2.0 * g3 * (1.0 + r));
}

// psi_gamma = Psi_gamma' (odd)
inline double entropy_deriv(double zeta, const EntropyParams& p) {
    detail::require_admissible(zeta, p, "entropy_deriv");
    const double g3 = std::cbrt(p.gamma);
    const double r = p.reg;
    const double u = 1.0 + r + g3 * zeta;
    const double v = 1.0 + r - g3 * zeta;
    if (u <= 0.0 || v <= 0.0) return zeta > 0 ? HUGE_VAL : -HUGE_VAL;
    return std::log(u / v) / (2.0 * (1.0 + r));
}

// psi_gamma' = Psi_gamma'' = gamma^{1/3} / ((1+reg)^2 - gamma^{2/3} zeta^2)
inline double entropy_second(double zeta, const EntropyParams& p) {
    detail::require_admissible(zeta, p, "entropy_second");
    const double g3 = std::cbrt(p.gamma);
    const double r = p.reg;
    return g3 / ((1.0 + r) * (1.0 + r) - g3 * g3 * zeta * zeta);
}

// Grid quadrature of int Psi_gamma(u) dx; rejects out-of-range samples and
// names the worst offender.
inline double entropy_integral(const Field& u, const EntropyParams& p) {
    const double b = p.bound();
    int worst = -1;
    double excess = 0.0;
    for (int j = 0; j < u.n_points(); ++j) {
        const double e = std::abs(u[j]) - b;
        if (e > excess) {
            excess = e;
            worst = j;
        }
    }
    if (excess > 1e-12 * b) {
        std::ostringstream os;
        os << "entropy_integral: sample " << u[worst] << " at index " << worst
           << " exceeds the admissible bound " << b;
        throw std::invalid_argument(os.str());
    }
    double acc = 0.0;
    for (int j = 0; j < u.n_points(); ++j)
        acc += entropy_value(std::clamp(u[j], -b, b), p);
    return acc / double(u.n_points());
}

// ---------------------------------------------------------------------------
// Diffusion coefficients

enum class SigmaKind { Smooth, FamilyN, SquareRoot };

// C-infinity step: 1 on (-inf, lo], 0 on [hi, inf).
inline double smooth_cutoff(double zeta, double lo, double hi) {
    if (zeta <= lo) return 1.0;
    if (zeta >= hi) return 0.0;
    const double t = (hi - zeta) / (hi - lo);
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

inline double smooth_cutoff_deriv(double zeta, double lo, double hi) {
    if (zeta <= lo || zeta >= hi) return 0.0;
    const double w = hi - lo;
    const double t = (hi - zeta) / w;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    const double da = a / (t * t);
    const double db = b / ((1.0 - t) * (1.0 - t));
    // d/dt [a/(a+b)] = (da*b + a*db) / (a+b)^2, and dt/dzeta = -1/w
    const double ds = (da * b + a * db) / ((a + b) * (a + b));
    return -ds / w;
}

// sigma_n(z) = A_n * chi(z) * (sqrt(z + 1/n) - sqrt(1/n)), chi = 1 on [0,2],
// 0 beyond 3, A_n fixed by sigma_n(1) = 1. Satisfies Assumption-style bounds
// for n >= 2; converges to sqrt uniformly on [m, 2] for every m > 0.
struct DiffusionCoefficient {
    SigmaKind kind = SigmaKind::Smooth;
    int n = 64;
    double sqrt_floor = 1e-12;

    static DiffusionCoefficient smooth() { return DiffusionCoefficient{SigmaKind::Smooth, 64}; }
    static DiffusionCoefficient family(int n) {
        if (n < 2) throw std::invalid_argument("DiffusionCoefficient: family index n must be >= 2");
        return DiffusionCoefficient{SigmaKind::FamilyN, n};
    }
    static DiffusionCoefficient square_root() {
        return DiffusionCoefficient{SigmaKind::SquareRoot, 0};
    }

    double amplitude() const { // A_n
        const double e = 1.0 / double(n);
        return 1.0 / (std::sqrt(1.0 + e) - std::sqrt(e));
    }
};

inline double sigma_eval(const DiffusionCoefficient& c, double zeta) {
    if (zeta < -1e-12) throw std::invalid_argument("sigma_eval: zeta must be >= 0");
    zeta = std::max(zeta, 0.0);
    if (c.kind == SigmaKind::SquareRoot) return std::sqrt(std::max(zeta, c.sqrt_floor));
    const double e = 1.0 / double(c.n);
    return c.amplitude() * smooth_cutoff(zeta, 2.0, 3.0) * (std::sqrt(zeta + e) - std::sqrt(e));
}

inline double sigma_prime_eval(const DiffusionCoefficient& c, double zeta) {
    if (zeta < -1e-12) throw std::invalid_argument("sigma_prime_eval: zeta must be >= 0");
    zeta = std::max(zeta, 0.0);
    if (c.kind == SigmaKind::SquareRoot) return 0.5 / std::sqrt(std::max(zeta, c.sqrt_floor));
    const double e = 1.0 / double(c.n);
    const double chi = smooth_cutoff(zeta, 2.0, 3.0);
    const double dchi = smooth_cutoff_deriv(zeta, 2.0, 3.0);
    return c.amplitude() * (dchi * (std::sqrt(zeta + e) - std::sqrt(e)) + chi * 0.5 / std::sqrt(zeta + e));
}

// sup |sigma'| over the support, by dense scan; feeds the LDP regime quantity.
inline double sigma_prime_sup(const DiffusionCoefficient& c) {
    double m = 0.0;
    const int samples = 6000;
    for (int i = 0; i <= samples; ++i) {
        const double z = 3.2 * double(i) / double(samples);
        m = std::max(m, std::abs(sigma_prime_eval(c, z)));
    }
    return m;
}

// ---------------------------------------------------------------------------
// Entropy-dissipation diagnostics (the three functionals of the uniform
// entropy estimate, plus the Young-inequality cross-term check).

struct DissipationRow {
    double time = 0.0;
    double entropy = 0.0;          // int Psi_gamma(u)
    double dissipation = 0.0;      // gamma^{-1/3} int |du|^2 / (1 - gamma^{2/3} u^2)
    double kernel_cross = 0.0;     // gamma^{-1/3}(1 + a gamma^{2/3}) int du (J_gamma * du)
    double grad_sq = 0.0;          // ||du||_L2^2
    bool cross_bound_ok = true;    // int du (J * du) <= ||du||^2
};

struct DissipationReport {
    std::vector<DissipationRow> rows;
    double sup_entropy = 0.0;
    double dissipation_integral = 0.0; // time quadrature
    double kernel_cross_integral = 0.0;
    bool all_cross_bounds_ok = true;
    bool admissibility_warning = false;
};

inline DissipationReport dissipation_report(const Trajectory& traj, const EntropyParams& p,
                                            const Kernel& j_gamma) {
    DissipationReport rep;
    const double g3 = std::cbrt(p.gamma);
    const double a = traj.meta.a;
    for (int m = 0; m < traj.n_snapshots(); ++m) {
        const Field& u = traj.snapshots[size_t(m)];
        DissipationRow row;
        row.time = traj.times[size_t(m)];
        row.entropy = entropy_integral(u, p);
        const Field du = derivative(u, 1);
        const Field jdu = convolve(j_gamma.samples, du);
        const int n = u.n_points();
        double diss = 0.0, cross = 0.0, grad = 0.0;
        for (int j = 0; j < n; ++j) {
            const double w = 1.0 - g3 * g3 * u[j] * u[j];
            if (w <= 0.0) rep.admissibility_warning = true;
            diss += du[j] * du[j] / std::max(w, 1e-12);
            cross += du[j] * jdu[j];
            grad += du[j] * du[j];
        }
        diss /= double(n);
        cross /= double(n);
        grad /= double(n);
        row.dissipation = diss / g3;
        row.kernel_cross = (1.0 + a * g3 * g3) * cross / g3;
        row.grad_sq = grad;
        row.cross_bound_ok = cross <= grad * (1.0 + 1e-10) + 1e-14;
        rep.all_cross_bounds_ok = rep.all_cross_bounds_ok && row.cross_bound_ok;
        rep.sup_entropy = (m == 0) ? row.entropy : std::max(rep.sup_entropy, row.entropy);
        rep.rows.push_back(row);
    }
    for (size_t m = 0; m + 1 < rep.rows.size(); ++m) {
        const double dt = rep.rows[m + 1].time - rep.rows[m].time;
        rep.dissipation_integral += 0.5 * dt * (rep.rows[m].dissipation + rep.rows[m + 1].dissipation);
        rep.kernel_cross_integral += 0.5 * dt * (rep.rows[m].kernel_cross + rep.rows[m + 1].kernel_cross);
    }
    return rep;
}

// Initial data generators. "paper_spike" follows the mollified construction
// u_{gamma,0} = gamma^{-1/3} rho(gamma^{-1/3} x) with rho an amplitude-
// calibrated bump; the achieved entropy ratio is reported, not asserted.
struct InitialData {
    Field field;
    double entropy_ratio = 0.0; // int(Psi_gamma(u0) + gamma^{-1/3}) / gamma^{1/3}
};

inline InitialData initial_data_smooth(int n, double amplitude, const EntropyParams& p) {
    Field u = Field::from_function(n, [&](double x) { return amplitude * std::sin(two_pi * x); });
    InitialData out;
    const double g3 = std::cbrt(p.gamma);
    out.entropy_ratio = (entropy_integral(u, p) + 1.0 / g3) / g3;
    out.field = std::move(u);
    return out;
}

inline InitialData initial_data_spike(int n, const EntropyParams& p, double base_radius = 0.25) {
    const double g3 = std::cbrt(p.gamma);
    // rho_0 = A * bump, A chosen so the Psi_1-entropy excess is ~ gamma^{1/3}
    const double amp = 0.8 * std::sqrt(g3);
    Field u = Field::from_function(n, [&](double x) {
        return (1.0 / g3) * amp * bump_profile(x / g3, base_radius) / bump_profile(0.0, base_radius);
    });
    InitialData out;
    out.entropy_ratio = (entropy_integral(u, p) + 1.0 / g3) / g3;
    out.field = std::move(u);
    return out;
}

} // namespace ikklab
