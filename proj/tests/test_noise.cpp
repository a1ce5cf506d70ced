#include "ikklab/noise.hpp"

#include <catch2/catch.hpp>

using namespace ikklab;

TEST_CASE("mode multipliers: unit mass, decay, and the delta -> 0 limit") {
    const int n = 256;
    auto mult = mode_multipliers(MollifierSpec::make(0.1, 0.25, n), 40);
    CHECK(mult[0] == Approx(1.0).margin(1e-10));
    for (size_t k = 1; k + 1 < mult.size() && mult[k] > 0.02; ++k)
        CHECK(mult[k + 1] < mult[k] + 1e-12);

    // direct quadrature oracle for eta_hat(k) = int eta_delta(y) cos(2 pi k y) dy
    MollifierSpec spec = MollifierSpec::make(0.1, 0.25, n);
    for (int k : {1, 3, 7}) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j)
            acc += spec.eta_delta.samples[j] * std::cos(two_pi * k * Field::node(j, n));
        acc /= n;
        CHECK(mult[size_t(k)] == Approx(acc).margin(1e-10));
    }

    // with k fixed, eta_hat_delta(k) -> 1 as delta -> 0
    double prev = 0.0;
    for (double delta : {0.5, 0.1, 0.001}) {
        auto m = mode_multipliers(MollifierSpec::make(delta, 0.25, n), 3);
        CHECK(m[3] > prev);
        prev = m[3];
    }
    CHECK(prev > 0.97);
}

TEST_CASE("mode_multipliers rejects K beyond Nyquist") {
    CHECK_THROWS_AS(mode_multipliers(MollifierSpec::make(0.1, 0.25, 64), 40), std::invalid_argument);
}

TEST_CASE("under-resolved mollifier is rejected") {
    CHECK_THROWS_AS(MollifierSpec::make(1e-5, 0.25, 64), std::invalid_argument);
}

TEST_CASE("noise coefficients: F2 vanishes, F1 and F3 are constants") {
    const int n = 256;
    NoiseCoefficients c = coefficients(MollifierSpec::make(0.1, 0.25, n), n / 3);
    CHECK(linf_norm(c.F2) < 1e-10);
    CHECK(c.F1_spread < 1e-10);
    CHECK(c.F3_spread < 1e-10);
    CHECK(c.F1 >= 0.0);
    CHECK(c.F3 >= 0.0);
}

TEST_CASE("F1 delta^(1/3) and F3 delta stay bounded across delta") {
    const int n = 256;
    double f1_min = HUGE_VAL, f1_max = 0.0, f3_min = HUGE_VAL, f3_max = 0.0;
    for (double delta : {0.2, 0.1, 0.05}) {
        NoiseCoefficients c = coefficients(MollifierSpec::make(delta, 0.25, n), n / 3);
        const double f1s = c.F1 * std::cbrt(delta);
        const double f3s = c.F3 * delta;
        f1_min = std::min(f1_min, f1s);
        f1_max = std::max(f1_max, f1s);
        f3_min = std::min(f3_min, f3s);
        f3_max = std::max(f3_max, f3s);
    }
    CHECK(f1_max / f1_min < 3.0);
    CHECK(f3_max / f3_min < 3.0);
}

TEST_CASE("zero-Gaussian hook produces zero increments") {
    const int n = 64;
    NoiseStream s{42, 0, /*force_zero=*/true};
    MollifierSpec spec = MollifierSpec::make(0.2, 0.25, n);
    CHECK(linf_norm(sample_correlated_increment(s, spec, n / 3, 1e-3, 7)) == 0.0);
    CHECK(linf_norm(sample_white_increment(s, n, n / 3, 1e-3, 7)) == 0.0);
}

TEST_CASE("same (seed, replicate) gives bitwise-identical increments") {
    const int n = 64;
    NoiseStream s1{987654321, 3}, s2{987654321, 3};
    MollifierSpec spec = MollifierSpec::make(0.2, 0.25, n);
    Field a = sample_correlated_increment(s1, spec, n / 3, 1e-3, 11);
    Field b = sample_correlated_increment(s2, spec, n / 3, 1e-3, 11);
    for (int j = 0; j < n; ++j) CHECK(a[j] == b[j]);

    NoiseStream s3{987654321, 4};
    Field c = sample_correlated_increment(s3, spec, n / 3, 1e-3, 11);
    CHECK(linf_norm(a - c) > 0.0);
}

TEST_CASE("correlated increment variance against the quadrature oracle") {
    const int n = 64;
    const double dt = 1e-3;
    MollifierSpec spec = MollifierSpec::make(0.15, 0.25, n);
    Field phi = Field::from_function(n, [](double x) { return std::sin(two_pi * x); });

    const int samples = 10000;
    double acc = 0.0, acc2 = 0.0;
    NoiseStream s{20240517, 0};
    for (int i = 0; i < samples; ++i) {
        Field inc = sample_correlated_increment(s, spec, n / 3, dt, uint64_t(i));
        double ip = 0.0;
        for (int j = 0; j < n; ++j) ip += inc[j] * phi[j];
        ip /= n;
        acc += ip;
        acc2 += ip * ip;
    }
    const double var = acc2 / samples - (acc / samples) * (acc / samples);

    // oracle: || eta_delta * phi ||_L2^2 by direct quadrature
    Field conv = convolve(spec.eta_delta.samples, phi);
    const double expect = l2_norm(conv) * l2_norm(conv);
    CHECK(var / dt == Approx(expect).epsilon(0.05));
}

TEST_CASE("white increment has unit variance per mode") {
    const int n = 64;
    const double dt = 2e-3;
    const int samples = 10000;
    NoiseStream s{77, 1};
    for (int kk : {1, 5}) {
        Field ek = Field::from_function(
            n, [&](double x) { return std::sqrt(2.0) * std::cos(two_pi * kk * x); });
        double acc2 = 0.0;
        for (int i = 0; i < samples; ++i) {
            Field inc = sample_white_increment(s, n, n / 3, dt, uint64_t(i));
            double ip = 0.0;
            for (int j = 0; j < n; ++j) ip += inc[j] * ek[j];
            ip /= n;
            acc2 += ip * ip;
        }
        CHECK(acc2 / samples == Approx(dt).epsilon(0.05));
    }
}

TEST_CASE("white and correlated increments are coupled mode by mode") {
    // for a fixed stream the difference uses multipliers (1 - eta_hat(k)); its
    // per-mode variance is (1 - eta_hat(k))^2 dt
    const int n = 64;
    const double dt = 1e-2;
    MollifierSpec spec = MollifierSpec::make(0.3, 0.25, n);
    auto mult = mode_multipliers(spec, n / 3);
    NoiseStream s{5150, 2};

    const int samples = 10000;
    const int kk = 2;
    Field ek = Field::from_function(
        n, [&](double x) { return std::sqrt(2.0) * std::sin(two_pi * kk * x); });
    double acc2 = 0.0;
    for (int i = 0; i < samples; ++i) {
        Field diff = sample_white_increment(s, n, n / 3, dt, uint64_t(i)) -
                     sample_correlated_increment(s, spec, n / 3, dt, uint64_t(i));
        double ip = 0.0;
        for (int j = 0; j < n; ++j) ip += diff[j] * ek[j];
        ip /= n;
        acc2 += ip * ip;
    }
    const double expect = (1.0 - mult[kk]) * (1.0 - mult[kk]) * dt;
    CHECK(acc2 / samples == Approx(expect).epsilon(0.05));
}
