// Stochastic Cahn-Hilliard dynamics on the torus,
//   du = d_xx [ V'(u) - (D/2) d_xx u ] dt - sqrt(2) d_x dW,
// with white, mollified, or zero noise. The biharmonic symbol is integrated
// exactly; V' is explicit (exponential Euler with phi_1 weights); the noise
// carries the exact Ornstein-Uhlenbeck per-step variance so the linear part of
// the dynamics is sampled from its exact transition at any dt.
//
// The cubic coefficient is 1/3: V'(u) = u^3/3 - a u, the drift produced by the
// Taylor expansion of the Kac transport term d_x(u^2 J * d_x u) = d_xx(u^3)/3.
#pragma once

#include "entropy.hpp"
#include "noise.hpp"
#include "trajectory.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace ikklab {

inline double ch_potential(double v, double a) { return v * v * v * v / 12.0 - 0.5 * a * v * v; }
inline double ch_potential_prime(double v, double a) { return v * v * v / 3.0 - a * v; }

enum class NoiseMode { White, Mollified, Off };
enum class ChScheme { SemiImplicit, OuSplitting };

struct CHParams {
    double a = -1.0;
    double d_coeff = 0.0098; // D = int J |x|^2, from the Kac kernel moment
    NoiseMode noise = NoiseMode::White;
    ChScheme scheme = ChScheme::SemiImplicit;
    double epsilon = 1.0; // noise intensity, matching the epsilon-IKK limit
    double delta = 0.1;   // correlation parameter for NoiseMode::Mollified
    double mollifier_radius = 0.25;
    double dt = 1e-4;
    double horizon = 0.5;
    int n_points = 256;
    int truncation = 0; // 0 -> N/3
    int stride = 16;
    bool dealias = true;

    int k_max() const { return truncation > 0 ? truncation : n_points / 3; }
};

struct SimulationAbort : std::runtime_error {
    Field last_good;
    double time = 0.0;
    SimulationAbort(Field f, double t)
        : std::runtime_error("simulation aborted: non-finite state at t = " + std::to_string(t)),
          last_good(std::move(f)), time(t) {}
};

inline double phi1(double x) {
    if (std::abs(x) < 1e-5) return 1.0 + 0.5 * x + x * x / 6.0;
    return std::expm1(x) / x;
}

// sqrt((1 - e^{2x}) / (-2x)): converts an N(0, dt) increment into the exact
// OU transition noise for a mode with (negative) rate x/dt.
inline double ou_noise_weight(double x) {
    if (std::abs(x) < 1e-5) return std::sqrt(1.0 + x + 2.0 * x * x / 3.0);
    return std::sqrt(std::expm1(2.0 * x) / (2.0 * x));
}

// Exact Ornstein-Uhlenbeck mode transition for dz = -lambda z dt - sqrt(2) d_x dW:
//   z' = e^{-lambda dt} z - (2 pi i k) mult sqrt((1 - e^{-2 lambda dt})/(2 lambda)) zeta
// with zeta = g_cos - i g_sin (independent standard normals). k = 0 is the
// identity: d_x annihilates the mean mode.
inline cplx ou_mode_update(cplx z_hat, int k, double lambda, double mult, cplx zeta, double dt) {
    if (k == 0) return z_hat;
    const double decay = std::exp(-lambda * dt);
    const double amp = mult * std::sqrt(dt) * ou_noise_weight(-lambda * dt);
    return decay * z_hat + cplx(0.0, -two_pi * k) * amp * zeta;
}

inline double ch_lambda(int k, const CHParams& p) {
    const double w = two_pi * k;
    return 0.5 * p.d_coeff * w * w * w * w;
}

inline cplx ou_mode_update(cplx z_hat, int k, const CHParams& p, cplx zeta, double dt) {
    const double mult = 1.0; // white; mollified callers pass the multiplier form
    return ou_mode_update(z_hat, k, ch_lambda(k, p), mult, zeta, dt);
}

namespace detail {

// Stepper with preallocated FFT buffers; shared by the stochastic simulator,
// the skeleton solver, and the w-part of the Appendix-A decomposition.
class ChStepper {
public:
    explicit ChStepper(const CHParams& p)
        : p_(p), n_(p.n_points), plan_(&fft_plan(p.n_points)) {
        require_grid(n_, "ChStepper");
        decay_.resize(size_t(n_));
        drift_w_.resize(size_t(n_));
        noise_w_.resize(size_t(n_));
        mask_.assign(size_t(n_), 1.0);
        const int kcut = n_ / 3;
        for (int i = 0; i < n_; ++i) {
            const int k = Spectrum::wavenumber_of_slot(i, n_);
            const double s = -ch_lambda(k, p) * p.dt;
            decay_[size_t(i)] = std::exp(s);
            drift_w_[size_t(i)] = p.dt * phi1(s);
            noise_w_[size_t(i)] = ou_noise_weight(s);
            if (p.dealias && std::abs(k) > kcut) mask_[size_t(i)] = 0.0;
        }
        if (p.noise == NoiseMode::Mollified) {
            mults_ = mode_multipliers(MollifierSpec::make(p.delta, p.mollifier_radius, n_), p.k_max());
        } else {
            mults_.assign(size_t(p.k_max()) + 1, 1.0);
        }
        const double amp = std::sqrt(std::max(p.epsilon, 0.0));
        for (auto& m : mults_) m *= amp;
        work_.resize(size_t(n_));
        vhat_.resize(size_t(n_));
    }

    const std::vector<double>& multipliers() const { return mults_; }

    // One step of u; z_forcing (optional) shifts the argument of V' for the
    // w-equation of the decomposition; control g enters as -sqrt(2) d_x g.
    void step(Spectrum& uhat, Field& u, const NoiseStream* stream, uint64_t step_idx,
              const Field* z_forcing, const Field* control) {
        for (int j = 0; j < n_; ++j) {
            const double v = z_forcing ? u[j] + (*z_forcing)[j] : u[j];
            work_[size_t(j)] = cplx(ch_potential_prime(v, p_.a), 0.0);
        }
        forward(work_.data(), vhat_.data());

        const bool with_noise = stream != nullptr && p_.noise != NoiseMode::Off;
        if (with_noise) {
            noise_buf_.resize(size_t(n_));
            increment_spectrum_into(*stream, mults_, n_, p_.dt, step_idx, noise_buf_.data());
        }

        Spectrum ghat;
        if (control) {
            for (int j = 0; j < n_; ++j) work_[size_t(j)] = cplx((*control)[j], 0.0);
            ghat.coeff.resize(size_t(n_));
            forward(work_.data(), ghat.coeff.data());
        }

        const double rt2 = std::sqrt(2.0);
        for (int i = 0; i < n_; ++i) {
            const int k = Spectrum::wavenumber_of_slot(i, n_);
            const cplx ik(0.0, two_pi * k);
            cplx expl = ik * ik * (vhat_[size_t(i)] * mask_[size_t(i)]);
            if (control) expl += -rt2 * ik * ghat.coeff[size_t(i)];
            cplx next = decay_[size_t(i)] * uhat.coeff[size_t(i)] + drift_w_[size_t(i)] * expl;
            if (with_noise) next += noise_w_[size_t(i)] * (-rt2) * ik * noise_buf_[size_t(i)];
            uhat.coeff[size_t(i)] = next;
        }
        uhat.coeff[size_t(n_ / 2)] = cplx(uhat.coeff[size_t(n_ / 2)].real(), 0.0);
        inverse(uhat.coeff.data(), u);
    }

    void forward(const cplx* in, cplx* out) const {
        std::copy(in, in + n_, out);
        plan_->transform(out, -1);
        const double inv_n = 1.0 / double(n_);
        for (int i = 0; i < n_; ++i) out[size_t(i)] *= origin_phase(i) * inv_n;
    }

    void inverse(const cplx* in, Field& out) const {
        std::copy(in, in + n_, scratch_init());
        for (int i = 0; i < n_; ++i) scratch_[size_t(i)] *= origin_phase(i);
        plan_->transform(scratch_.data(), +1);
        out.values.resize(size_t(n_));
        for (int j = 0; j < n_; ++j) out[j] = scratch_[size_t(j)].real();
    }

private:
    cplx* scratch_init() const {
        scratch_.resize(size_t(n_));
        return scratch_.data();
    }

    CHParams p_;
    int n_;
    const FftPlan* plan_;
    std::vector<double> decay_, drift_w_, noise_w_, mask_;
    std::vector<double> mults_;
    std::vector<cplx> work_, vhat_, noise_buf_;
    mutable std::vector<cplx> scratch_;
};

inline void record_snapshot(Trajectory& traj, double t, const Field& u) {
    traj.times.push_back(t);
    traj.snapshots.push_back(u);
}

inline void check_state(const Field& u, const Field& last_good, double t) {
    for (double v : u.values)
        if (!std::isfinite(v)) throw SimulationAbort(last_good, t);
}

} // namespace detail

inline Trajectory simulate_ch(const CHParams& p, const Field& u0, const NoiseStream& stream);

// Appendix-A decomposition: z solves the linear equation with exact OU mode
// updates and z(0) = 0; w solves dw = d_xx[V'(w+z) - (D/2) d_xx w] dt with
// w(0) = u0, driven by the z value at each step start.
struct Decomposition {
    Trajectory z;
    Trajectory w;
};

namespace detail {

// Advance the z-modes one step, sharing the (mode, step) Gaussian draws with
// the direct simulator so the coupling is pathwise.
inline void z_exact_step(std::vector<cplx>& zhat, int n, int k_max, const std::vector<double>& mults,
                         const CHParams& p, const NoiseStream& stream, uint64_t step_idx) {
    for (int k = 1; k <= k_max; ++k) {
        double gc = 0.0, gs = 0.0;
        stream.gauss_pair(uint32_t(k), step_idx, gc, gs);
        const cplx zeta(gc, -gs);
        const double lam = ch_lambda(k, p);
        const cplx znew = ou_mode_update(zhat[size_t(Spectrum::slot_of_wavenumber(k, n))], k, lam,
                                         mults[size_t(k)], zeta, p.dt);
        zhat[size_t(Spectrum::slot_of_wavenumber(k, n))] = znew;
        zhat[size_t(Spectrum::slot_of_wavenumber(-k, n))] = std::conj(znew);
    }
}

} // namespace detail

inline Decomposition decompose(const CHParams& p, const Field& u0, const NoiseStream& stream) {
    detail::require_grid(p.n_points, "decompose");
    detail::require_finite(u0, "decompose");
    CHParams pw = p;
    pw.noise = NoiseMode::Off;
    detail::ChStepper stepper(pw);
    const auto mults = [&] {
        std::vector<double> m;
        if (p.noise == NoiseMode::Off) {
            m.assign(size_t(p.k_max()) + 1, 0.0);
        } else if (p.noise == NoiseMode::Mollified) {
            m = mode_multipliers(MollifierSpec::make(p.delta, p.mollifier_radius, p.n_points),
                                 p.k_max());
        } else {
            m.assign(size_t(p.k_max()) + 1, 1.0);
        }
        const double amp = std::sqrt(std::max(p.epsilon, 0.0));
        for (auto& v : m) v *= amp;
        return m;
    }();

    const int n = p.n_points;
    const int steps = std::max(1, int(std::lround(p.horizon / p.dt)));
    CHParams pz = p;
    pz.dt = p.horizon / double(steps);

    std::vector<cplx> zhat(size_t(n), cplx(0.0, 0.0));
    Field z(n, 0.0), w = u0;
    Spectrum what = to_spectrum(w);

    Decomposition out;
    out.z.meta.model = "ch_z";
    out.w.meta.model = "ch_w";
    out.z.meta.dt = out.w.meta.dt = pz.dt;
    out.z.meta.n_points = out.w.meta.n_points = n;
    detail::record_snapshot(out.z, 0.0, z);
    detail::record_snapshot(out.w, 0.0, w);

    Spectrum ztmp(n);
    for (int s = 0; s < steps; ++s) {
        stepper.step(what, w, nullptr, uint64_t(s), &z, nullptr); // w sees z at step start
        detail::z_exact_step(zhat, n, p.k_max(), mults, pz, stream, uint64_t(s));
        ztmp.coeff = zhat;
        z = from_spectrum(ztmp);
        detail::check_state(w, out.w.snapshots.back(), (s + 1) * pz.dt);
        if ((s + 1) % p.stride == 0 || s + 1 == steps) {
            detail::record_snapshot(out.z, (s + 1) * pz.dt, z);
            detail::record_snapshot(out.w, (s + 1) * pz.dt, w);
        }
    }
    return out;
}

inline Trajectory simulate_ch(const CHParams& p, const Field& u0, const NoiseStream& stream) {
    detail::require_grid(p.n_points, "simulate_ch");
    detail::require_finite(u0, "simulate_ch");
    if (p.scheme == ChScheme::OuSplitting) {
        Decomposition d = decompose(p, u0, stream);
        Trajectory traj;
        traj.meta = d.w.meta;
        traj.meta.model = "ch";
        traj.times = d.w.times;
        for (int m = 0; m < d.w.n_snapshots(); ++m)
            traj.snapshots.push_back(d.w.snapshots[size_t(m)] + d.z.snapshots[size_t(m)]);
        return traj;
    }

    const int steps = std::max(1, int(std::lround(p.horizon / p.dt)));
    CHParams pa = p;
    pa.dt = p.horizon / double(steps);
    detail::ChStepper stepper(pa);

    Trajectory traj;
    traj.meta.model = "ch";
    traj.meta.a = p.a;
    traj.meta.delta = p.delta;
    traj.meta.dt = pa.dt;
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
        stepper.step(uhat, u, &stream, uint64_t(s), nullptr, nullptr);
        detail::check_state(u, traj.snapshots.back(), (s + 1) * pa.dt);
        if ((s + 1) % p.stride == 0 || s + 1 == steps) {
            detail::record_snapshot(traj, (s + 1) * pa.dt, u);
            if (std::abs(mean(u) - mass0) > 1e-8 * (1.0 + std::abs(mass0)))
                throw std::runtime_error("simulate_ch: mass conservation violated");
        }
    }
    return traj;
}

// int (D/4) |d_x u|^2 + V(u) dx; decreases along noise-free trajectories.
inline double free_energy(const Field& u, const CHParams& p) {
    const Field du = derivative(u, 1);
    double acc = 0.0;
    for (int j = 0; j < u.n_points(); ++j)
        acc += 0.25 * p.d_coeff * du[j] * du[j] + ch_potential(u[j], p.a);
    return acc / double(u.n_points());
}

// ---------------------------------------------------------------------------
// Appendix-A Parseval mode sum, in the paper's displayed convention (integer
// wavenumbers, unit biharmonic rate): sum_{k>=1} |k|^2 (1 - e^{-2|k|^4 T}) / (2|k|^4),
// plus an independent quadrature of int_0^T sum |k|^2 e^{-2|k|^4 s} ds.
struct ParsevalSum {
    double closed_form = 0.0;
    double quadrature = 0.0;
};

namespace detail {

// Composite 10-point Gauss-Legendre on [0, 1].
inline double gauss10(const std::function<double(double)>& f, double lo, double hi, int panels) {
    static const double xs[5] = {0.1488743389816312, 0.4333953941292472, 0.6794095682990244,
                                 0.8650633666889845, 0.9739065285171717};
    static const double ws[5] = {0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
                                 0.1494513491505806, 0.0666713443086881};
    double acc = 0.0;
    const double h = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
        const double c = lo + (p + 0.5) * h;
        for (int i = 0; i < 5; ++i) {
            acc += ws[i] * (f(c + 0.5 * h * xs[i]) + f(c - 0.5 * h * xs[i]));
        }
    }
    return acc * 0.5 * h;
}

} // namespace detail

inline ParsevalSum parseval_gradient_integral(double horizon, int k_max) {
    if (k_max < 1) throw std::invalid_argument("parseval_gradient_integral: K must be >= 1");
    ParsevalSum out;
    for (int k = 1; k <= k_max; ++k) {
        const double k4 = double(k) * k * k * k;
        out.closed_form += double(k) * k * (-std::expm1(-2.0 * k4 * horizon)) / (2.0 * k4);
        // integrate |k|^2 e^{-2 |k|^4 s} over [0, T]; clip where the tail is below 1e-300
        const double alpha = 2.0 * k4;
        const double s_max = std::min(horizon, 690.0 / alpha);
        out.quadrature += detail::gauss10(
            [&](double s) { return double(k) * k * std::exp(-alpha * s); }, 0.0, s_max, 64);
    }
    return out;
}

// Physical-convention expectation E int_0^T ||d_x z||^2 dt for the stochastic
// convolution with per-frequency multipliers mult_k and rate (D/2)(2 pi k)^4.
inline double ou_gradient_integral_expectation(const CHParams& p, double horizon,
                                               const std::vector<double>& mults) {
    double acc = 0.0;
    const int k_max = int(mults.size()) - 1;
    for (int k = 1; k <= k_max; ++k) {
        const double w2 = (two_pi * k) * (two_pi * k);
        const double lam = ch_lambda(k, p);
        const double mode_var_integral =
            w2 * mults[size_t(k)] * mults[size_t(k)] / lam *
            (horizon - (-std::expm1(-2.0 * lam * horizon)) / (2.0 * lam));
        acc += 2.0 * w2 * mode_var_integral; // +k and -k slots
    }
    return acc;
}

// Monte Carlo E || z_delta - z ||^2_{L2 L2} with coupled mode Gaussians; the
// difference is itself an OU path with multipliers (1 - eta_hat_delta(k)).
struct MollificationGap {
    double mc_estimate = 0.0;
    double closed_form = 0.0;
};

inline MollificationGap noise_mollification_gap(const CHParams& p, double delta, int replicates,
                                                uint64_t seed) {
    const int n = p.n_points;
    const int k_max = p.k_max();
    const auto eta = mode_multipliers(MollifierSpec::make(delta, p.mollifier_radius, n), k_max);
    const double amp = std::sqrt(std::max(p.epsilon, 0.0));
    std::vector<double> gap_mult(size_t(k_max) + 1);
    for (int k = 0; k <= k_max; ++k) gap_mult[size_t(k)] = amp * (1.0 - eta[size_t(k)]);

    MollificationGap out;
    for (int k = 1; k <= k_max; ++k) {
        const double w2 = (two_pi * k) * (two_pi * k);
        const double lam = ch_lambda(k, p);
        out.closed_form += 2.0 * w2 * gap_mult[size_t(k)] * gap_mult[size_t(k)] / lam *
                           (p.horizon - (-std::expm1(-2.0 * lam * p.horizon)) / (2.0 * lam));
    }

    const int steps = std::max(1, int(std::lround(p.horizon / p.dt)));
    const double dt = p.horizon / double(steps);
    CHParams pz = p;
    pz.dt = dt;
    double acc = 0.0;
    for (int rep = 0; rep < replicates; ++rep) {
        NoiseStream stream{seed, uint32_t(rep)};
        std::vector<cplx> zhat(size_t(n), cplx(0.0, 0.0));
        double path_int = 0.0, prev = 0.0;
        for (int s = 0; s < steps; ++s) {
            detail::z_exact_step(zhat, n, k_max, gap_mult, pz, stream, uint64_t(s));
            double norm2 = 0.0;
            for (const cplx& c : zhat) norm2 += std::norm(c);
            path_int += 0.5 * dt * (prev + norm2);
            prev = norm2;
        }
        acc += path_int;
    }
    out.mc_estimate = replicates > 0 ? acc / replicates : 0.0;
    return out;
}

} // namespace ikklab
