// Deterministic skeleton equations and minimal-norm control recovery.
//
// The Cahn-Hilliard skeleton is d_t u = d_xx[V'(u) - (D/2) d_xx u] - sqrt2 d_x g;
// its minimal control cost 1/2 ||g||^2_{L2 L2} is recovered from a trajectory
// through the drift residual: since -sqrt2 d_x g = r and the infimum is
// attained at mean-zero g, g = -antiderivative(r)/sqrt2.
//
// The IKK skeleton replaces the drift by the rescaled Kac operator and the
// control coefficient by sqrt(1 - gamma^{2/3} u^2); the minimal-norm control
// has the Riesz form g = sqrt(w) d_x Psi with d_x(w d_x Psi) = -r/sqrt2, and
// the rate is the weighted Dirichlet energy 1/2 int int w |d_x Psi|^2.
#pragma once

#include "ch.hpp"
#include "elliptic.hpp"
#include "ikk.hpp"
#include "io.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace ikklab {

struct ControlField {
    std::vector<double> times;
    std::vector<Field> slices;

    // piecewise-linear interpolation in time
    Field at(double t) const {
        if (slices.empty()) throw std::invalid_argument("ControlField: empty");
        if (t <= times.front()) return slices.front();
        if (t >= times.back()) return slices.back();
        size_t hi = 1;
        while (times[hi] < t) ++hi;
        const double t0 = times[hi - 1], t1 = times[hi];
        const double w = (t - t0) / (t1 - t0);
        Field out(slices.front().n_points());
        for (int j = 0; j < out.n_points(); ++j)
            out[j] = (1.0 - w) * slices[hi - 1][j] + w * slices[hi][j];
        return out;
    }

    static ControlField from_function(double horizon, int slices_count, int n,
                                      const std::function<double(double, double)>& g) {
        ControlField out;
        for (int m = 0; m <= slices_count; ++m) {
            const double t = horizon * double(m) / double(slices_count);
            out.times.push_back(t);
            out.slices.push_back(Field::from_function(n, [&](double x) { return g(t, x); }));
        }
        return out;
    }

    double l2l2_norm_sq() const {
        double acc = 0.0;
        for (size_t m = 0; m + 1 < slices.size(); ++m) {
            const double dt = times[m + 1] - times[m];
            const double a = l2_norm(slices[m]), b = l2_norm(slices[m + 1]);
            acc += 0.5 * dt * (a * a + b * b);
        }
        return acc;
    }
};

struct RateValue {
    double value = 0.0;          // 1/2 ||g||^2 by time quadrature
    double residual_norm = 0.0;  // defect of the defining identity, never hidden
    double mean_projection = 0.0; // spatial-mean content discarded by the recovery
};

// Control persistence mirrors the trajectory format: one JSON header line
// with the time grid, then concatenated field records.
inline void save_control_field(const std::string& path, const ControlField& g) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_control_field: cannot open " + path);
    nlohmann::json header{{"kind", "control"}, {"times", g.times}, {"slices", g.slices.size()}};
    os << header.dump() << "\n";
    for (const Field& s : g.slices) write_field(os, s);
}

inline ControlField load_control_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_control_field: cannot open " + path);
    std::string line;
    std::getline(is, line);
    nlohmann::json header = nlohmann::json::parse(line);
    ControlField g;
    g.times = header.at("times").get<std::vector<double>>();
    const size_t count = header.at("slices").get<size_t>();
    for (size_t i = 0; i < count; ++i) g.slices.push_back(read_field(is));
    return g;
}

// ---------------------------------------------------------------------------
// Skeleton solvers

inline Trajectory solve_skeleton_ch(const Field& u0, const ControlField& g, const CHParams& p) {
    CHParams pd = p;
    pd.noise = NoiseMode::Off;
    const int steps = std::max(1, int(std::lround(p.horizon / p.dt)));
    pd.dt = p.horizon / double(steps);
    detail::ChStepper stepper(pd);

    bool mean_warning = false;
    for (const Field& s : g.slices)
        if (std::abs(mean(s)) > 1e-10) mean_warning = true;

    Trajectory traj;
    traj.meta.model = mean_warning ? "skeleton_ch[mean-control-discarded]" : "skeleton_ch";
    traj.meta.a = p.a;
    traj.meta.dt = pd.dt;
    traj.meta.horizon = p.horizon;
    traj.meta.n_points = p.n_points;
    traj.meta.stride = p.stride;

    Field u = u0;
    Spectrum uhat = to_spectrum(u);
    detail::record_snapshot(traj, 0.0, u);
    for (int s = 0; s < steps; ++s) {
        const Field slice = g.at((s + 0.5) * pd.dt);
        stepper.step(uhat, u, nullptr, uint64_t(s), nullptr, &slice);
        detail::check_state(u, traj.snapshots.back(), (s + 1) * pd.dt);
        if ((s + 1) % p.stride == 0 || s + 1 == steps)
            detail::record_snapshot(traj, (s + 1) * pd.dt, u);
    }
    return traj;
}

inline Trajectory solve_skeleton_ikk(const Field& u0, const ControlField& g, const IKKParams& p) {
    IKKParams pd = p;
    pd.epsilon = 0.0;
    ControlSource src = [&g](double t) { return g.at(t); };
    Trajectory traj = simulate_ikk(pd, u0, NoiseStream{0, 0}, &src, ControlCoupling::SqrtWeight);
    traj.meta.model = "skeleton_ikk";
    return traj;
}

// ---------------------------------------------------------------------------
// Minimal-norm control recovery

namespace detail {

// Cahn-Hilliard drift d_xx[V'(u)] - (D/2) d_xxxx u, spectrally, with the same
// dealiasing convention as the solver.
inline Field ch_drift(const Field& u, const CHParams& p) {
    const int n = u.n_points();
    Field vp(n);
    for (int j = 0; j < n; ++j) vp[j] = ch_potential_prime(u[j], p.a);
    Spectrum sv = to_spectrum(vp);
    if (p.dealias) dealias(sv);
    Spectrum su = to_spectrum(u);
    Spectrum out(n);
    for (int i = 0; i < n; ++i) {
        const int k = Spectrum::wavenumber_of_slot(i, n);
        const double w2 = (two_pi * k) * (two_pi * k);
        out.coeff[size_t(i)] = -w2 * sv.coeff[size_t(i)] -
                               0.5 * p.d_coeff * w2 * w2 * su.coeff[size_t(i)];
    }
    return from_spectrum(out);
}

// IKK skeleton drift gamma^{-2/3} d_xx u - gamma^{-2/3}(1+a g^{2/3}) d_x[(1-g^{2/3}u^2) J*d_x u]
inline Field ikk_drift(const Field& u, const IKKParams& p, const Kernel& j_gamma) {
    const int n = u.n_points();
    const double g23 = p.gamma23();
    const Field du = derivative(u, 1);
    const Field jdu = convolve(j_gamma.samples, du);
    Field flux(n);
    for (int j = 0; j < n; ++j)
        flux[j] = (1.0 - g23 * u[j] * u[j]) * jdu[j];
    Spectrum sf = to_spectrum(flux);
    if (p.dealias) dealias(sf);
    Spectrum su = to_spectrum(u);
    Spectrum out(n);
    const double kac_pref = (1.0 + p.a * g23) / g23;
    for (int i = 0; i < n; ++i) {
        const int k = Spectrum::wavenumber_of_slot(i, n);
        const cplx ik(0.0, two_pi * k);
        out.coeff[size_t(i)] = ik * ik / g23 * su.coeff[size_t(i)] - kac_pref * ik * sf.coeff[size_t(i)];
    }
    return from_spectrum(out);
}

} // namespace detail

inline std::pair<ControlField, RateValue> recover_control_ch(const Trajectory& traj,
                                                             const CHParams& p) {
    const int m_snap = traj.n_snapshots();
    if (m_snap < 3) throw std::invalid_argument("recover_control_ch: need at least 3 snapshots");
    ControlField g;
    RateValue rate;
    const double rt2 = std::sqrt(2.0);
    for (int m = 0; m + 1 < m_snap; ++m) {
        const double dt = traj.times[size_t(m + 1)] - traj.times[size_t(m)];
        Field ubar = 0.5 * (traj.snapshots[size_t(m)] + traj.snapshots[size_t(m + 1)]);
        Field r = (1.0 / dt) * (traj.snapshots[size_t(m + 1)] - traj.snapshots[size_t(m)]) -
                  detail::ch_drift(ubar, p);
        const double rm = mean(r);
        const double scale = std::max(1.0, l2_norm(r));
        if (std::abs(rm) > 1e-6 * scale)
            throw std::invalid_argument("recover_control_ch: residual has nonzero mean (mass leak upstream)");
        for (auto& v : r.values) v -= rm;
        Field slice = (-1.0 / rt2) * antiderivative_mean_zero(r);
        const double gl2 = l2_norm(slice);
        rate.value += 0.5 * dt * gl2 * gl2;
        rate.residual_norm = std::max(rate.residual_norm, std::abs(rm));
        g.times.push_back(0.5 * (traj.times[size_t(m)] + traj.times[size_t(m + 1)]));
        g.slices.push_back(std::move(slice));
    }
    return {std::move(g), rate};
}

inline std::pair<ControlField, RateValue> recover_control_ikk(const Trajectory& traj,
                                                              const IKKParams& p,
                                                              double weight_floor = 1e-6) {
    const int m_snap = traj.n_snapshots();
    if (m_snap < 3) throw std::invalid_argument("recover_control_ikk: need at least 3 snapshots");
    const int n = traj.snapshots[0].n_points();
    Kernel jg = rescale(make_bump_kernel(p.kernel_radius, n), p.gamma);
    const double g23 = p.gamma23();
    const double rt2 = std::sqrt(2.0);

    ControlField g;
    RateValue rate;
    for (int m = 0; m + 1 < m_snap; ++m) {
        const double dt = traj.times[size_t(m + 1)] - traj.times[size_t(m)];
        Field ubar = 0.5 * (traj.snapshots[size_t(m)] + traj.snapshots[size_t(m + 1)]);
        Field r = (1.0 / dt) * (traj.snapshots[size_t(m + 1)] - traj.snapshots[size_t(m)]) -
                  detail::ikk_drift(ubar, p, jg);
        const double rm = mean(r);
        const double scale = std::max(1.0, l2_norm(r));
        if (std::abs(rm) > 1e-6 * scale)
            throw std::invalid_argument("recover_control_ikk: residual has nonzero mean (mass leak upstream)");
        Field weight(n);
        for (int j = 0; j < n; ++j) {
            weight[j] = 1.0 - g23 * ubar[j] * ubar[j];
            if (weight[j] < weight_floor) {
                std::ostringstream os;
                os << "recover_control_ikk: weight " << weight[j] << " below floor at index " << j
                   << " (t = " << traj.times[size_t(m)] << ")";
                throw std::invalid_argument(os.str());
            }
        }
        Field f(n);
        for (int j = 0; j < n; ++j) f[j] = -(r[j] - rm) / rt2;
        EllipticSolution sol = weighted_periodic_solve(weight, f);
        if (sol.residual > 1e-10)
            throw std::runtime_error("recover_control_ikk: elliptic solve residual too large");

        // flux-form Dirichlet energy, consistent with the discrete operator
        const double h = 1.0 / double(n);
        double energy = 0.0;
        Field slice(n);
        for (int j = 0; j < n; ++j) {
            const double wh = 0.5 * (weight[j] + weight[(j + 1) % n]);
            const double dpsi = (sol.psi[(j + 1) % n] - sol.psi[j]) / h;
            energy += wh * dpsi * dpsi * h;
            const double dpsi_c = (sol.psi[(j + 1) % n] - sol.psi[(j - 1 + n) % n]) / (2.0 * h);
            slice[j] = std::sqrt(weight[j]) * dpsi_c;
        }
        rate.value += 0.5 * dt * energy;
        rate.residual_norm = std::max(rate.residual_norm, std::max(std::abs(rm), sol.residual));
        g.times.push_back(0.5 * (traj.times[size_t(m)] + traj.times[size_t(m + 1)]));
        g.slices.push_back(std::move(slice));
    }
    return {std::move(g), rate};
}

// ---------------------------------------------------------------------------
// Weak-strong stability experiment: g_m(t,x) = g(t,x) + sin(2 pi m t) h(x)
// converges weakly to g, and the solution map is continuous along it.
struct StabilityReport {
    std::vector<int> m_values;
    std::vector<double> distances;
};

inline StabilityReport stability_experiment(const ControlField& g, const Field& oscillation,
                                            const std::vector<int>& m_values, const Field& u0,
                                            const CHParams& p) {
    Trajectory base = solve_skeleton_ch(u0, g, p);
    StabilityReport rep;
    rep.m_values = m_values;
    const int slices = 512;
    for (int m : m_values) {
        ControlField gm;
        for (int q = 0; q <= slices; ++q) {
            const double t = p.horizon * double(q) / double(slices);
            Field s = g.at(t);
            const double osc = std::sin(two_pi * m * t);
            for (int j = 0; j < s.n_points(); ++j) s[j] += osc * oscillation[j];
            gm.times.push_back(t);
            gm.slices.push_back(std::move(s));
        }
        Trajectory tm = solve_skeleton_ch(u0, gm, p);
        rep.distances.push_back(l2l2_distance(tm, base));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Gamma-convergence experiment: recovery sequence u_gamma from the IKK
// skeleton against the Cahn-Hilliard limit with the same control.
struct GammaConvergenceRow {
    double gamma = 0.0;
    double distance = 0.0;   // || u_gamma - u ||_{L2 L2}
    double rate_ikk = 0.0;   // I_IKK,gamma(u_gamma), recovered
    double rate_ch = 0.0;    // I_CH(u), recovered
    double relative_gap = 0.0;
};

struct GammaConvergenceReport {
    std::vector<GammaConvergenceRow> rows;
};

inline GammaConvergenceReport gamma_convergence_experiment(
    const std::function<Field(double)>& u0_family, const Field& u0_limit, const ControlField& g,
    const std::vector<double>& gamma_list, const CHParams& pch, const IKKParams& base) {
    Trajectory limit = solve_skeleton_ch(u0_limit, g, pch);
    auto [g_ch, rate_ch] = recover_control_ch(limit, pch);

    GammaConvergenceReport rep;
    for (double gamma : gamma_list) {
        IKKParams p = base;
        p.gamma = gamma;
        p.epsilon = 0.0;
        p.dt = pch.dt;
        p.stride = pch.stride;
        p.horizon = pch.horizon;
        p.n_points = pch.n_points;
        Trajectory ug = solve_skeleton_ikk(u0_family(gamma), g, p);
        auto [g_ikk, rate_ikk] = recover_control_ikk(ug, p);

        GammaConvergenceRow row;
        row.gamma = gamma;
        // compare on the common snapshot grid
        row.distance = l2l2_distance(ug, limit);
        row.rate_ikk = rate_ikk.value;
        row.rate_ch = rate_ch.value;
        row.relative_gap = std::abs(rate_ikk.value - rate_ch.value) / std::max(rate_ch.value, 1e-8);
        rep.rows.push_back(row);
    }
    return rep;
}

} // namespace ikklab
