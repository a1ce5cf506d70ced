// Acceptance checklist for the laboratory. Each criterion runs at its pinned
// tolerances and prints exactly one PASS/FAIL line; the binary exits nonzero
// if any criterion fails. Individual criteria can be selected by number on
// the command line.

#include "ikklab/experiments.hpp"

#include <cstdio>
#include <chrono>
#include <cstring>
#include <random>
#include <set>

using namespace ikklab;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

char scratch[512];

std::string fmt(const char* pattern, auto... args) {
    std::snprintf(scratch, sizeof scratch, pattern, args...);
    return scratch;
}

// 1. Spectral core: derivative, Parseval, antiderivative round trip.
Outcome criterion_spectral_core() {
    const int n = 64;
    Field s = Field::from_function(n, [](double x) { return std::sin(two_pi * x); });
    Field ds = derivative(s, 1);
    double d_err = 0.0;
    for (int j = 0; j < n; ++j)
        d_err = std::max(d_err, std::abs(ds[j] - two_pi * std::cos(two_pi * Field::node(j, n))));

    std::mt19937 gen(12);
    std::normal_distribution<double> dist;
    Spectrum rand_spec(n);
    for (int k = 1; k <= n / 3; ++k) {
        const cplx c(dist(gen), dist(gen));
        rand_spec.coeff[size_t(Spectrum::slot_of_wavenumber(k, n))] = c;
        rand_spec.coeff[size_t(Spectrum::slot_of_wavenumber(-k, n))] = std::conj(c);
    }
    Field f = from_spectrum(rand_spec);
    Spectrum sf = to_spectrum(f);
    double parseval_sum = 0.0;
    for (const auto& c : sf.coeff) parseval_sum += std::norm(c);
    const double p_err = std::abs(parseval_sum - l2_norm(f) * l2_norm(f)) /
                         std::max(parseval_sum, 1e-300);
    const double a_err = linf_norm(derivative(antiderivative_mean_zero(f), 1) - f);

    Outcome out;
    out.pass = d_err < 1e-10 && p_err < 1e-10 && a_err < 1e-10;
    out.detail = fmt("derivative sup %.1e, Parseval rel %.1e, antiderivative round trip %.1e",
                     d_err, p_err, a_err);
    return out;
}

// 2. Entropy identities on a dense grid for gamma in {1, 0.1, 0.01}.
Outcome criterion_entropy_identities() {
    double worst_id = 0.0;
    bool bounds_ok = true;
    for (double gamma : {1.0, 0.1, 0.01}) {
        EntropyParams p(gamma);
        const double b = p.bound();
        const double g3 = std::cbrt(gamma);
        worst_id = std::max(worst_id, std::abs(entropy_value(0.0, p) + b) / b);
        worst_id = std::max(worst_id,
                            std::abs(entropy_value(b, p) - b * (std::log(2.0) - 1.0)) / b);
        worst_id = std::max(worst_id,
                            std::abs(entropy_value(-b, p) - b * (std::log(2.0) - 1.0)) / b);
        for (int i = 0; i <= 10000; ++i) {
            const double z = -b + 2.0 * b * i / 10000.0;
            const double v = entropy_value(z, p);
            if (v < 0.5 * g3 * z * z - b - 1e-12 * b || v >= 0.0) bounds_ok = false;
        }
    }
    Outcome out;
    out.pass = worst_id < 1e-12 && bounds_ok;
    out.detail = fmt("identity error %.1e, lower bound and strict negativity %s on 10^4-point grids",
                     worst_id, bounds_ok ? "hold" : "violated");
    return out;
}

// 3. Noise coefficients: F2 = 0, F1/F3 constants, delta scalings within factor 3.
Outcome criterion_noise_coefficients() {
    const int n = 256;
    double f2_sup = 0.0, spread = 0.0;
    double f1s_min = HUGE_VAL, f1s_max = 0.0, f3s_min = HUGE_VAL, f3s_max = 0.0;
    for (double delta : {0.2, 0.1, 0.05}) {
        NoiseCoefficients c = coefficients(MollifierSpec::make(delta, 0.25, n), n / 3);
        f2_sup = std::max(f2_sup, linf_norm(c.F2));
        spread = std::max(spread, std::max(c.F1_spread, c.F3_spread));
        f1s_min = std::min(f1s_min, c.F1 * std::cbrt(delta));
        f1s_max = std::max(f1s_max, c.F1 * std::cbrt(delta));
        f3s_min = std::min(f3s_min, c.F3 * delta);
        f3s_max = std::max(f3s_max, c.F3 * delta);
    }
    Outcome out;
    out.pass = f2_sup < 1e-10 && spread < 1e-10 && f1s_max / f1s_min < 3.0 &&
               f3s_max / f3s_min < 3.0;
    out.detail = fmt("F2 sup %.1e, constancy spread %.1e, F1*d^(1/3) ratio %.2f, F3*d ratio %.2f",
                     f2_sup, spread, f1s_max / f1s_min, f3s_max / f3s_min);
    return out;
}

// 4. Appendix-A Parseval sum and the Monte Carlo gradient integral.
Outcome criterion_parseval_sum() {
    ParsevalSum s = parseval_gradient_integral(1.0, 64);
    const double closed_err = std::abs(s.closed_form - s.quadrature) / s.closed_form;

    CHParams p;
    p.d_coeff = moment(make_bump_kernel(0.25, 512), 2);
    const int k_max = 32;
    const double horizon = 0.05;
    const int steps = 250;
    const double dt = horizon / steps;
    std::vector<double> ones(size_t(k_max) + 1, 1.0);
    const double expect = ou_gradient_integral_expectation(p, horizon, ones);

    double acc = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
        NoiseStream stream{424242, uint32_t(rep)};
        std::vector<cplx> zhat(512, cplx(0.0, 0.0));
        CHParams pz = p;
        pz.dt = dt;
        double path = 0.0, prev = 0.0;
        for (int step = 0; step < steps; ++step) {
            detail::z_exact_step(zhat, 512, k_max, ones, pz, stream, uint64_t(step));
            double grad = 0.0;
            for (int k = 1; k <= k_max; ++k) {
                const double w2 = (two_pi * k) * (two_pi * k);
                grad += 2.0 * w2 * std::norm(zhat[size_t(k)]);
            }
            path += 0.5 * dt * (prev + grad);
            prev = grad;
        }
        acc += path;
    }
    const double mc = acc / 200.0;
    const double mc_err = std::abs(mc - expect) / expect;

    Outcome out;
    out.pass = closed_err < 1e-8 && mc_err < 0.10;
    out.detail = fmt("closed form vs quadrature rel %.1e (K=64), MC gradient integral off by %.1f%% (K=32, M=200)",
                     closed_err, 100.0 * mc_err);
    return out;
}

// 5. Conservation and admissibility at N = 128 over T = 0.5; clamp census in
// the default regime (gamma = 0.1, delta = 0.1, eps = 1, a = -1).
Outcome criterion_conservation() {
    CHParams pch;
    pch.a = -1.0;
    pch.d_coeff = moment(make_bump_kernel(0.25, 512), 2);
    pch.noise = NoiseMode::White;
    pch.n_points = 128;
    pch.dt = 5e-6;
    pch.horizon = 0.5;
    pch.stride = 2000;
    Field u0 = Field::from_function(128, [](double x) { return 0.3 + 0.2 * std::sin(two_pi * x); });
    Trajectory ch = simulate_ch(pch, u0, NoiseStream{7, 0});
    double ch_drift = 0.0;
    for (const auto& snap : ch.snapshots)
        ch_drift = std::max(ch_drift, std::abs(mean(snap) - mean(u0)));

    IKKParams pikk;
    pikk.gamma = 0.1;
    pikk.delta = 0.1;
    pikk.a = -1.0;
    pikk.epsilon = 1.0;
    pikk.n_points = 128;
    pikk.horizon = 0.5;
    pikk.stride = 5000;
    Trajectory ikk = simulate_ikk(pikk, Field(128, 0.0), NoiseStream{7, 0});
    double ikk_drift = 0.0;
    double sup_abs = 0.0;
    for (const auto& snap : ikk.snapshots) {
        ikk_drift = std::max(ikk_drift, std::abs(mean(snap)));
        sup_abs = std::max(sup_abs, linf_norm(snap));
    }
    const size_t clamps = ikk.events.size();

    Outcome out;
    const bool mass_ok = ch_drift < 1e-8 * (1.0 + std::abs(mean(u0))) && ikk_drift < 1e-8;
    out.pass = mass_ok && clamps == 0;
    out.detail = fmt("mass drift ch %.1e / ikk %.1e, sup|u| %.3f (bound %.3f), clamp events %zu%s",
                     ch_drift, ikk_drift, sup_abs, pikk.bound(), clamps,
                     clamps ? " [only the zero-clamp sub-criterion fails: at eps=1 the field's "
                              "stationary amplitude presses the admissible band, see ledger]"
                            : "");
    return out;
}

// 6. Remainder scaling slopes on the gamma-uniform reference ensemble.
Outcome criterion_remainder_scaling() {
    ExperimentConfig cfg;
    cfg.experiment = "remainder_scaling";
    cfg.gamma_list = {0.5, 0.25, 0.125};
    cfg.delta_list = {0.2, 0.1, 0.05};
    cfg.gamma = 0.25;
    cfg.delta = 0.1;
    cfg.a = -0.2;
    cfg.epsilon = 0.01;
    cfg.truncation = 8;
    cfg.remainder_beta = 2.0;
    cfg.grid_n = 128;
    cfg.horizon = 0.1;
    cfg.stride = 256;
    cfg.ensemble = 4;
    cfg.seed = 31;
    ReportTable t = run_remainder_scaling(cfg);
    const int slope_gamma_row = int(t.rows.size()) - 2;
    const int slope_delta_row = int(t.rows.size()) - 1;
    const double r1 = t.numeric(slope_gamma_row, "r1");
    const double r3 = t.numeric(slope_gamma_row, "r3");
    const double r4d = t.numeric(slope_delta_row, "r4");
    Outcome out;
    out.pass = r1 > 0.5 && r1 < 0.85 && r3 > 0.2 && r3 < 0.5 && r4d > -0.5 && r4d < -0.2;
    out.detail = fmt("R1 slope %.3f (band 0.5..0.85), R3 slope %.3f (0.2..0.5), R4 delta-slope %.3f (-0.5..-0.2)",
                     r1, r3, r4d);
    return out;
}

// 7. Two-step convergence trends with coupled noise, M = 50.
Outcome criterion_two_step() {
    ExperimentConfig cfg;
    cfg.experiment = "converge_two_step";
    cfg.gamma_list = {0.5, 0.25, 0.125};
    cfg.delta_list = {0.2, 0.1, 0.05};
    cfg.delta = 0.1;
    cfg.a = -1.0;
    cfg.epsilon = 0.02;
    cfg.grid_n = 64;
    cfg.horizon = 0.1;
    cfg.stride = 128;
    cfg.ensemble = 50;
    cfg.seed = 20240601;
    ReportTable t = run_converge_two_step(cfg);
    const double g1 = t.numeric(0, "mean_distance"), g2 = t.numeric(1, "mean_distance"),
                 g3 = t.numeric(2, "mean_distance");
    const double d1 = t.numeric(3, "mean_distance"), d2 = t.numeric(4, "mean_distance"),
                 d3 = t.numeric(5, "mean_distance");
    Outcome out;
    out.pass = g2 < g1 && g3 < g2 && d2 < d1 && d3 < d2;
    out.detail = fmt("gamma column %.4f > %.4f > %.4f; delta column %.4f > %.4f > %.4f (M=50)",
                     g1, g2, g3, d1, d2, d3);
    return out;
}

// 8. Rate-function round trips within 2%.
Outcome criterion_rate_round_trip() {
    CHParams p;
    p.a = -1.0;
    p.d_coeff = moment(make_bump_kernel(0.25, 512), 2);
    p.noise = NoiseMode::Off;
    p.n_points = 128;
    p.dt = 2e-6;
    p.horizon = 0.02;
    p.stride = 100;
    ControlField gstar = ControlField::from_function(p.horizon, 256, p.n_points, [&](double t, double x) {
        return 3.0 * std::sin(two_pi * x) * (1.0 + 0.5 * std::sin(two_pi * t / p.horizon));
    });
    Field u0 = Field::from_function(p.n_points, [](double x) { return 0.3 * std::sin(two_pi * x); });
    Trajectory traj = solve_skeleton_ch(u0, gstar, p);
    auto [gc, rate_ch] = recover_control_ch(traj, p);
    const double expect_ch = 0.5 * gstar.l2l2_norm_sq();
    const double ch_err = std::abs(rate_ch.value - expect_ch) / expect_ch;

    IKKParams pikk;
    pikk.gamma = 0.25;
    pikk.a = -1.0;
    pikk.epsilon = 0.0;
    pikk.n_points = 128;
    pikk.horizon = 0.02;
    pikk.stride = 100;
    const int n = pikk.n_points;
    const double dt = 2e-6;
    const double g23 = pikk.gamma23();
    Field dphi = derivative(
        Field::from_function(n, [](double x) { return 0.3 * std::sin(two_pi * x); }), 1);
    detail::IkkStepper stepper(pikk, dt);
    Field u = Field::from_function(n, [](double x) { return 0.4 * std::sin(two_pi * x); });
    Spectrum uhat = to_spectrum(u);
    Trajectory wtraj;
    wtraj.meta.model = "skeleton_ikk";
    wtraj.meta.gamma = pikk.gamma;
    wtraj.meta.a = pikk.a;
    wtraj.meta.n_points = n;
    detail::record_snapshot(wtraj, 0.0, u);
    double true_cost = 0.0;
    const int steps = int(std::lround(pikk.horizon / dt));
    for (int s = 0; s < steps; ++s) {
        Field gs(n);
        double cost = 0.0;
        for (int j = 0; j < n; ++j) {
            const double w = std::max(0.0, 1.0 - g23 * u[j] * u[j]);
            gs[j] = std::sqrt(w) * dphi[j];
            cost += gs[j] * gs[j];
        }
        true_cost += 0.5 * dt * cost / n;
        stepper.step(uhat, u, nullptr, uint64_t(s), &gs, ControlCoupling::SqrtWeight, nullptr,
                     s * dt);
        if ((s + 1) % pikk.stride == 0 || s + 1 == steps)
            detail::record_snapshot(wtraj, (s + 1) * dt, u);
    }
    auto [gi, rate_ikk] = recover_control_ikk(wtraj, pikk);
    const double ikk_err = std::abs(rate_ikk.value - true_cost) / true_cost;

    Outcome out;
    out.pass = ch_err < 0.02 && ikk_err < 0.02;
    out.detail = fmt("CH round trip off by %.2f%%, weighted IKK round trip off by %.2f%% (tolerance 2%%)",
                     100.0 * ch_err, 100.0 * ikk_err);
    return out;
}

// 9. Weak-strong stability under oscillatory controls.
Outcome criterion_stability() {
    CHParams p;
    p.a = -0.5;
    p.d_coeff = moment(make_bump_kernel(0.25, 512), 2);
    p.noise = NoiseMode::Off;
    p.n_points = 64;
    p.dt = 1e-5;
    p.horizon = 0.5;
    p.stride = 500;
    ControlField g = ControlField::from_function(p.horizon, 4, p.n_points,
                                                 [](double, double) { return 0.0; });
    Field h = Field::from_function(p.n_points, [](double x) { return std::sin(two_pi * x); });
    StabilityReport rep = stability_experiment(g, h, {1, 4, 16}, Field(p.n_points, 0.0), p);
    Outcome out;
    out.pass = rep.distances[2] < 0.5 * rep.distances[0];
    out.detail = fmt("distance at m=16 is %.3f of the m=1 value (threshold 0.5); distances %.4f, %.4f, %.4f",
                     rep.distances[2] / rep.distances[0], rep.distances[0], rep.distances[1],
                     rep.distances[2]);
    return out;
}

// 10. Gamma-convergence of the rate functions along the recovery sequence.
Outcome criterion_gamma_convergence() {
    ExperimentConfig cfg;
    cfg.experiment = "gamma_converge";
    cfg.gamma_list = {0.5, 0.25, 0.125};
    cfg.delta = 0.1;
    cfg.a = -0.2;
    cfg.control_amplitude = 3.0;
    cfg.control_mode = 2;
    cfg.initial_amplitude = 1.0;
    cfg.grid_n = 128;
    cfg.horizon = 0.05;
    cfg.stride = 50;
    cfg.seed = 9;
    ReportTable t = run_gamma_converge(cfg);
    const double gap1 = t.numeric(0, "relative_gap"), gap2 = t.numeric(1, "relative_gap"),
                 gap3 = t.numeric(2, "relative_gap");
    const bool limsup_ok = t.numeric(2, "rate_ikk") <= 1.1 * t.numeric(2, "rate_ch");
    Outcome out;
    out.pass = gap2 < gap1 && gap3 < gap2 && gap3 < 0.15 && limsup_ok;
    out.detail = fmt("relative rate gap %.4f > %.4f > %.4f, final %.2f%% (threshold 15%%), limsup bound %s",
                     gap1, gap2, gap3, 100.0 * gap3, limsup_ok ? "holds" : "violated");
    return out;
}

// 11. Determinism: identical config and seed give byte-identical CSV output.
Outcome criterion_determinism() {
    auto digest = [](const ReportTable& t) { return fnv1a64(t.to_csv()); };

    ExperimentConfig conv;
    conv.experiment = "converge_two_step";
    conv.gamma_list = {0.5, 0.25};
    conv.delta_list = {0.2, 0.1};
    conv.delta = 0.1;
    conv.epsilon = 0.02;
    conv.grid_n = 64;
    conv.horizon = 0.02;
    conv.stride = 64;
    conv.ensemble = 4;
    conv.seed = 99;
    ExperimentConfig conv_workers = conv;
    conv_workers.workers = 2;

    ExperimentConfig noise = conv;
    noise.experiment = "noise_checks";

    ExperimentConfig gc = conv;
    gc.experiment = "gamma_converge";
    gc.a = -0.2;
    gc.control_amplitude = 3.0;
    gc.control_mode = 2;
    gc.initial_amplitude = 1.0;
    gc.horizon = 0.01;
    gc.stride = 25;

    const bool conv_ok = digest(run_converge_two_step(conv)) == digest(run_converge_two_step(conv)) &&
                         digest(run_converge_two_step(conv_workers)) == digest(run_converge_two_step(conv));
    const bool noise_ok = digest(run_noise_checks(noise)) == digest(run_noise_checks(noise));
    const bool gc_ok = digest(run_gamma_converge(gc)) == digest(run_gamma_converge(gc));

    Outcome out;
    out.pass = conv_ok && noise_ok && gc_ok;
    out.detail = fmt("converge %s (incl. 2-worker rerun), noise-check %s, gamma-converge %s",
                     conv_ok ? "byte-identical" : "DIFFERS", noise_ok ? "byte-identical" : "DIFFERS",
                     gc_ok ? "byte-identical" : "DIFFERS");
    return out;
}

} // namespace

int main(int argc, char** argv) {
    struct Entry {
        int number;
        const char* name;
        Outcome (*fn)();
    };
    const std::vector<Entry> entries{
        {1, "spectral core", criterion_spectral_core},
        {2, "entropy identities", criterion_entropy_identities},
        {3, "noise coefficients", criterion_noise_coefficients},
        {4, "stochastic convolution Parseval sum", criterion_parseval_sum},
        {5, "conservation and admissibility", criterion_conservation},
        {6, "remainder scaling slopes", criterion_remainder_scaling},
        {7, "two-step convergence trends", criterion_two_step},
        {8, "rate-function round trips", criterion_rate_round_trip},
        {9, "weak-strong stability", criterion_stability},
        {10, "gamma-convergence of rate functions", criterion_gamma_convergence},
        {11, "byte-identical reruns", criterion_determinism},
    };

    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& e : entries) {
        if (!selected.empty() && !selected.count(e.number)) continue;
        Outcome out;
        const auto start = std::chrono::steady_clock::now();
        try {
            out = e.fn();
        } catch (const std::exception& ex) {
            out.pass = false;
            out.detail = std::string("exception: ") + ex.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] criterion %2d: %s — %s [%.1fs]\n", out.pass ? "PASS" : "FAIL", e.number,
                    e.name, out.detail.c_str(), secs);
        std::fflush(stdout);
        if (!out.pass) ++failures;
    }
    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
