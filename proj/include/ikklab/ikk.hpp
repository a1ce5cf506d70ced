// Rescaled fluctuating Ising-Kac-Kawasaki dynamics in Ito form,
//   du = gamma^{-2/3} d_xx u dt
//      - gamma^{-2/3}(1 + a gamma^{2/3}) d_x[(1 - gamma^{2/3} u^2) J_gamma * d_x u] dt
//      - sqrt(2) eps^{1/2} d_x( sigma(1 - gamma^{2/3} u^2) dW_delta )
//      + 4 eps d_x( F1 sigma'(1 - gamma^{2/3} u^2)^2 gamma^{4/3} u^2 d_x u ) dt,
// plus an optional deterministic control drift. The nonlocal linear operator is
// diagonal in Fourier space and integrated exactly; the cubic Kac transport,
// Ito correction, control, and noise are explicit. States are clamped into
// [-gamma^{-1/3} + margin, gamma^{-1/3} - margin] with every event logged.
#pragma once

#include "ch.hpp"
#include "entropy.hpp"
#include "kernel.hpp"
#include "noise.hpp"
#include "trajectory.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace ikklab {

enum class ControlCoupling { Sigma, SqrtWeight };

struct IKKParams {
    double gamma = 0.1;
    double delta = 0.1;
    double a = -1.0; // theorem-regime experiments require a < 0
    double epsilon = 1.0;
    DiffusionCoefficient coeff = DiffusionCoefficient::smooth();
    double dt = 0.0; // 0 -> stability rule with u_max = admissible bound
    double horizon = 0.5;
    int n_points = 128;
    int truncation = 0; // 0 -> N/3
    double clamp_margin_rel = 1e-6;
    double c_stab = 0.2;
    bool dealias = true;
    double kernel_radius = 0.25;
    double mollifier_radius = 0.25;
    int stride = 64;

    int k_max() const { return truncation > 0 ? truncation : n_points / 3; }
    double bound() const { return 1.0 / std::cbrt(gamma); }
    double gamma23() const { return std::cbrt(gamma) * std::cbrt(gamma); }

    // dt <= c_stab dx^2 / (1 + transport + correction). The explicit Kac
    // transport acts like a diffusion with coefficient (1 + a g^{2/3}) u^2;
    // the Ito correction adds 4 eps F1 sigma'(w)^2 g^{4/3} u^2, which is the
    // binding term near the admissible boundary where sigma' is largest.
    double dt_rule(double u_max) const {
        const double dx = 1.0 / double(n_points);
        const double g23 = gamma23();
        const double transport = std::max(0.0, 1.0 + a * g23) * u_max * u_max;
        double correction = 0.0;
        if (epsilon > 0.0) {
            const double w_min = std::max(1.0 - g23 * u_max * u_max,
                                          coeff.kind == SigmaKind::SquareRoot ? 0.005 : 0.0);
            const double sp = sigma_prime_eval(coeff, w_min);
            // F1 ~ ||eta||_L2^2 delta^{-1/3} with ||eta||^2 ~ 0.68 / radius
            const double f1_bound = 1.0 + (0.75 / mollifier_radius) / std::cbrt(delta);
            correction = 4.0 * epsilon * f1_bound * sp * sp * g23 * g23 * u_max * u_max;
        }
        return c_stab * dx * dx / (1.0 + transport + correction);
    }

    double dt_effective() const { return dt > 0.0 ? dt : dt_rule(bound()); }
};

// -gamma^{-2/3} (2 pi k)^2 [1 - (1 + a gamma^{2/3}) J_hat_gamma(k)]; approaches
// the Cahn-Hilliard symbol -(2 pi k)^2 [(D/2)(2 pi k)^2 - a] as gamma -> 0.
inline double linear_symbol(int k, const IKKParams& p, const Kernel& j_gamma) {
    const int n = j_gamma.samples.n_points();
    if (std::abs(k) > n / 2) throw std::invalid_argument("linear_symbol: |k| exceeds Nyquist");
    const double jhat = to_spectrum(j_gamma.samples).at_wavenumber(k).real();
    const double w2 = (two_pi * k) * (two_pi * k);
    return -w2 / p.gamma23() * (1.0 - (1.0 + p.a * p.gamma23()) * jhat);
}

namespace detail {

class IkkStepper {
public:
    IkkStepper(const IKKParams& p, double dt)
        : p_(p), n_(p.n_points), dt_(dt), plan_(&fft_plan(p.n_points)) {
        require_grid(n_, "IkkStepper");
        j_gamma_ = rescale(make_bump_kernel(p.kernel_radius, n_), p.gamma);
        Spectrum js = to_spectrum(j_gamma_.samples);
        jhat_.resize(size_t(n_));
        for (int i = 0; i < n_; ++i) jhat_[size_t(i)] = js.coeff[size_t(i)].real();
        const MollifierSpec spec = MollifierSpec::make(p.delta, p.mollifier_radius, n_);
        mults_ = mode_multipliers(spec, p.k_max());
        f1_ = coefficients(spec, p.k_max()).F1;

        const double g23 = p.gamma23();
        decay_.resize(size_t(n_));
        drift_w_.resize(size_t(n_));
        noise_w_.resize(size_t(n_));
        mask_.assign(size_t(n_), 1.0);
        const int kcut = n_ / 3;
        for (int i = 0; i < n_; ++i) {
            const int k = Spectrum::wavenumber_of_slot(i, n_);
            const double w2 = (two_pi * k) * (two_pi * k);
            const double jhat = js.coeff[size_t(i)].real();
            const double s = -w2 / g23 * (1.0 - (1.0 + p.a * g23) * jhat) * dt_;
            decay_[size_t(i)] = std::exp(s);
            drift_w_[size_t(i)] = dt_ * phi1(s);
            noise_w_[size_t(i)] = ou_noise_weight(s);
            if (p.dealias && std::abs(k) > kcut) mask_[size_t(i)] = 0.0;
        }
        du_.values.resize(size_t(n_));
        jdu_.values.resize(size_t(n_));
        dw_.values.resize(size_t(n_));
        buf_.resize(size_t(n_));
        buf2_.resize(size_t(n_));
        drift_hat_.resize(size_t(n_));
        noise_hat_.resize(size_t(n_));
    }

    const Kernel& kernel() const { return j_gamma_; }
    double f1() const { return f1_; }
    double dt() const { return dt_; }

    StepReport step(Spectrum& uhat, Field& u, const NoiseStream* stream, uint64_t step_idx,
                    const Field* control, ControlCoupling coupling, Trajectory* event_sink,
                    double t_now) {
        const double g23 = p_.gamma23();
        const double g43 = g23 * g23;
        const double rt2 = std::sqrt(2.0);
        const double bound = p_.bound();
        const double margin = p_.clamp_margin_rel * bound;
        const bool with_noise = stream != nullptr && p_.epsilon > 0.0;

        // d_x u and J_gamma * d_x u
        for (int i = 0; i < n_; ++i) {
            const int k = Spectrum::wavenumber_of_slot(i, n_);
            buf_[size_t(i)] = cplx(0.0, two_pi * k) * uhat.coeff[size_t(i)];
        }
        buf_[size_t(n_ / 2)] = 0.0;
        for (int i = 0; i < n_; ++i) buf2_[size_t(i)] = buf_[size_t(i)] * jhat_[size_t(i)];
        inverse(buf_.data(), du_);
        inverse(buf2_.data(), jdu_);

        if (with_noise) {
            increment_spectrum_into(*stream, mults_, n_, dt_, step_idx, buf2_.data());
            inverse(buf2_.data(), dw_);
        }

        // physical-space drift and noise divergence arguments
        const double kac_pref = 1.0 + p_.a * g23;
        double expl_mag = 0.0;
        for (int j = 0; j < n_; ++j) {
            const double uj = u[j];
            const double w = std::max(0.0, 1.0 - g23 * uj * uj);
            double drift = kac_pref * uj * uj * jdu_[j];
            if (with_noise) {
                const double sp = sigma_prime_eval(p_.coeff, w);
                drift += 4.0 * p_.epsilon * f1_ * g43 * uj * uj * du_[j] * sp * sp;
            }
            if (control) {
                const double coef = coupling == ControlCoupling::Sigma
                                        ? sigma_eval(p_.coeff, w)
                                        : std::sqrt(w);
                drift += -rt2 * coef * (*control)[j];
            }
            buf_[size_t(j)] = cplx(drift, 0.0);
            expl_mag += drift * drift;
        }
        forward(buf_.data(), drift_hat_.data());

        if (with_noise) {
            const double eps_half = std::sqrt(p_.epsilon);
            for (int j = 0; j < n_; ++j) {
                const double w = std::max(0.0, 1.0 - g23 * u[j] * u[j]);
                buf_[size_t(j)] = cplx(-rt2 * eps_half * sigma_eval(p_.coeff, w) * dw_[j], 0.0);
            }
            forward(buf_.data(), noise_hat_.data());
        }

        for (int i = 0; i < n_; ++i) {
            const int k = Spectrum::wavenumber_of_slot(i, n_);
            const cplx ik(0.0, two_pi * k);
            cplx next = decay_[size_t(i)] * uhat.coeff[size_t(i)] +
                        drift_w_[size_t(i)] * ik * drift_hat_[size_t(i)] * mask_[size_t(i)];
            if (with_noise)
                next += noise_w_[size_t(i)] * ik * noise_hat_[size_t(i)] * mask_[size_t(i)];
            uhat.coeff[size_t(i)] = next;
        }
        uhat.coeff[size_t(n_ / 2)] = cplx(uhat.coeff[size_t(n_ / 2)].real(), 0.0);
        inverse(uhat.coeff.data(), u);

        // clamp into the admissible band, logging every event; the clipped mass
        // is redistributed over unclamped points so the conservative structure
        // survives clamping
        StepReport rep;
        const double level = bound - margin;
        const double target_mass = uhat.coeff[0].real();
        for (int j = 0; j < n_; ++j) {
            if (std::abs(u[j]) > level) {
                if (event_sink)
                    event_sink->events.push_back(ClampEvent{t_now + dt_, j, std::abs(u[j]) - level});
                u[j] = std::clamp(u[j], -level, level);
                ++rep.clamp_count;
            }
        }
        if (rep.clamp_count > 0) {
            for (int iter = 0; iter < 64; ++iter) {
                const double excess = mean(u) - target_mass;
                if (std::abs(excess) < 1e-14 * (1.0 + std::abs(target_mass))) break;
                int free_count = 0;
                for (int j = 0; j < n_; ++j)
                    if (std::abs(u[j]) < level) ++free_count;
                if (free_count == 0) {
                    rep.saturated = true;
                    break;
                }
                const double shift = -excess * double(n_) / double(free_count);
                for (int j = 0; j < n_; ++j) {
                    if (std::abs(u[j]) < level)
                        u[j] = std::clamp(u[j] + shift, -level, level);
                }
            }
            for (int j = 0; j < n_; ++j) buf_[size_t(j)] = cplx(u[j], 0.0);
            forward(buf_.data(), uhat.coeff.data());
        }
        for (int j = 0; j < n_; ++j) rep.max_abs = std::max(rep.max_abs, std::abs(u[j]));
        rep.explicit_magnitude = std::sqrt(expl_mag / double(n_)) * dt_;
        rep.cfl_ratio = dt_ / p_.dt_rule(rep.max_abs);
        return rep;
    }

    void forward(const cplx* in, cplx* out) const {
        std::copy(in, in + n_, out);
        plan_->transform(out, -1);
        const double inv_n = 1.0 / double(n_);
        for (int i = 0; i < n_; ++i) out[size_t(i)] *= origin_phase(i) * inv_n;
    }

    void inverse(const cplx* in, Field& out) const {
        scratch_.assign(in, in + n_);
        for (int i = 0; i < n_; ++i) scratch_[size_t(i)] *= origin_phase(i);
        plan_->transform(scratch_.data(), +1);
        out.values.resize(size_t(n_));
        for (int j = 0; j < n_; ++j) out[j] = scratch_[size_t(j)].real();
    }

private:
    IKKParams p_;
    int n_;
    double dt_;
    const FftPlan* plan_;
    Kernel j_gamma_;
    std::vector<double> mults_, decay_, drift_w_, noise_w_, mask_, jhat_;
    double f1_ = 0.0;
    Field du_, jdu_, dw_;
    std::vector<cplx> buf_, buf2_, drift_hat_, noise_hat_;
    mutable std::vector<cplx> scratch_;
};

} // namespace detail

// Optional per-step control source: slice(t) sampled at step midpoints.
using ControlSource = std::function<Field(double)>;

inline Trajectory simulate_ikk(const IKKParams& p, const Field& u0, const NoiseStream& stream,
                               const ControlSource* control = nullptr,
                               ControlCoupling coupling = ControlCoupling::Sigma) {
    detail::require_grid(p.n_points, "simulate_ikk");
    detail::require_finite(u0, "simulate_ikk");
    const double bound = p.bound();
    if (linf_norm(u0) > bound)
        throw std::invalid_argument("simulate_ikk: initial data exceeds the admissible bound");

    const double dt0 = p.dt_effective();
    if (p.dt > 0.0) {
        const double allowed = p.dt_rule(std::max(1.0, linf_norm(u0)));
        if (p.dt > allowed * (1.0 + 1e-12)) {
            std::ostringstream os;
            os << "simulate_ikk: dt = " << p.dt << " violates the stability rule (<= " << allowed
               << " for the initial state)";
            throw std::invalid_argument(os.str());
        }
    }
    const int steps = std::max(1, int(std::lround(p.horizon / dt0)));
    const double dt = p.horizon / double(steps);
    detail::IkkStepper stepper(p, dt);

    Trajectory traj;
    traj.meta.model = "ikk";
    traj.meta.gamma = p.gamma;
    traj.meta.delta = p.delta;
    traj.meta.a = p.a;
    traj.meta.epsilon = p.epsilon;
    traj.meta.dt = dt;
    traj.meta.horizon = p.horizon;
    traj.meta.n_points = p.n_points;
    traj.meta.truncation = p.k_max();
    traj.meta.stride = p.stride;
    traj.meta.seed = stream.seed;
    traj.meta.replicate = stream.replicate;

    Field u = u0;
    Spectrum uhat = to_spectrum(u);
    detail::record_snapshot(traj, 0.0, u);
    const double mass0 = mean(u0);
    for (int s = 0; s < steps; ++s) {
        const double t = s * dt;
        Field g;
        const Field* gp = nullptr;
        if (control) {
            g = (*control)(t + 0.5 * dt);
            gp = &g;
        }
        const StepReport rep = stepper.step(uhat, u, p.epsilon > 0.0 ? &stream : nullptr,
                                            uint64_t(s), gp, coupling, &traj, t);
        if (rep.saturated) throw SimulationAbort(traj.snapshots.back(), t + dt);
        detail::check_state(u, traj.snapshots.back(), t + dt);
        if ((s + 1) % p.stride == 0 || s + 1 == steps) {
            detail::record_snapshot(traj, (s + 1) * dt, u);
            if (std::abs(mean(u) - mass0) > 1e-8 * (1.0 + l1_norm(u0)))
                throw std::runtime_error("simulate_ikk: mass conservation violated");
        }
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Remainder fields of the Cahn-Hilliard rewrite form (paper normalization,
// without the noise-intensity factor the dynamics applies to R4).
struct RemainderFields {
    Field r1, r2, r3, r4;
    bool resolved = true;
};

inline RemainderFields remainder_fields(const Field& u, const IKKParams& p, const Kernel& j_gamma,
                                        double d_coeff, double f1) {
    detail::require_same_grid(u, j_gamma.samples, "remainder_fields");
    const double g23 = p.gamma23();
    const double g43 = g23 * g23;
    const double kac_pref = 1.0 + p.a * g23;
    const int n = u.n_points();

    Spectrum su = to_spectrum(u);
    double peak = 0.0, tail = 0.0;
    for (int i = 0; i < n; ++i) {
        const int k = std::abs(Spectrum::wavenumber_of_slot(i, n));
        const double mag = std::abs(su.coeff[size_t(i)]);
        peak = std::max(peak, mag);
        if (k > n / 3) tail = std::max(tail, mag);
    }

    RemainderFields out;
    out.resolved = peak == 0.0 || tail <= 1e-8 * peak;

    Field u3(n);
    for (int j = 0; j < n; ++j) u3[j] = u[j] * u[j] * u[j];
    out.r1 = (-0.5 * d_coeff * p.a * g23) * derivative(u, 4) +
             (p.a * g23 / 3.0) * derivative(u3, 2);

    const Field du = derivative(u, 1);
    const Field jdu = convolve(j_gamma.samples, du);
    Field arg(n);
    for (int j = 0; j < n; ++j) arg[j] = u[j] * u[j] * (jdu[j] - du[j]);
    out.r2 = kac_pref * derivative(arg, 1);

    const TaylorDefect defect = taylor_defect(j_gamma, u, p.gamma, d_coeff);
    out.r3 = (-kac_pref / g23) * derivative(defect.defect, 1);
    out.resolved = out.resolved && defect.resolved;

    Field arg4(n);
    for (int j = 0; j < n; ++j) {
        const double w = std::max(0.0, 1.0 - g23 * u[j] * u[j]);
        const double sp = sigma_prime_eval(p.coeff, w);
        arg4[j] = 4.0 * f1 * sp * sp * g43 * u[j] * u[j] * du[j];
    }
    out.r4 = derivative(arg4, 1);
    return out;
}

// Discrete W^{alpha,2}([0,T]; H^{-beta}) norm over trajectory snapshots:
// L^2 part plus the Gagliardo double sum.
inline double time_regularity_norm(const Trajectory& traj, double alpha, double beta) {
    if (!(alpha > 0.0 && alpha < 0.5))
        throw std::invalid_argument("time_regularity_norm: alpha must lie in (0, 1/2)");
    if (!(beta > 0.0)) throw std::invalid_argument("time_regularity_norm: beta must be positive");
    const int m_snap = traj.n_snapshots();
    if (m_snap < 4) throw std::invalid_argument("time_regularity_norm: need at least 4 snapshots");

    const int n = traj.snapshots[0].n_points();
    std::vector<Spectrum> spectra;
    spectra.reserve(size_t(m_snap));
    for (const Field& f : traj.snapshots) spectra.push_back(to_spectrum(f));

    std::vector<double> weight(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        const int k = Spectrum::wavenumber_of_slot(i, n);
        weight[size_t(i)] = std::pow(1.0 + (two_pi * k) * (two_pi * k), -beta);
    }
    // Gram matrix of H^{-beta} inner products
    std::vector<double> gram(size_t(m_snap) * size_t(m_snap), 0.0);
    for (int a_i = 0; a_i < m_snap; ++a_i)
        for (int b_i = a_i; b_i < m_snap; ++b_i) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i)
                acc += weight[size_t(i)] *
                       (spectra[size_t(a_i)].coeff[size_t(i)] *
                        std::conj(spectra[size_t(b_i)].coeff[size_t(i)]))
                           .real();
            gram[size_t(a_i) * size_t(m_snap) + size_t(b_i)] = acc;
            gram[size_t(b_i) * size_t(m_snap) + size_t(a_i)] = acc;
        }

    const double dt_snap = (traj.times.back() - traj.times.front()) / double(m_snap - 1);
    double l2_part = 0.0;
    for (int m = 0; m < m_snap; ++m) {
        const double w = (m == 0 || m == m_snap - 1) ? 0.5 : 1.0;
        l2_part += w * gram[size_t(m) * size_t(m_snap) + size_t(m)] * dt_snap;
    }
    double gagliardo = 0.0;
    for (int m = 0; m < m_snap; ++m)
        for (int q = 0; q < m_snap; ++q) {
            if (m == q) continue;
            const double ts = std::abs(traj.times[size_t(m)] - traj.times[size_t(q)]);
            const double diff2 = gram[size_t(m) * size_t(m_snap) + size_t(m)] +
                                 gram[size_t(q) * size_t(m_snap) + size_t(q)] -
                                 2.0 * gram[size_t(m) * size_t(m_snap) + size_t(q)];
            gagliardo += std::max(0.0, diff2) / std::pow(ts, 1.0 + 2.0 * alpha) * dt_snap * dt_snap;
        }
    return std::sqrt(l2_part + gagliardo);
}

} // namespace ikklab
