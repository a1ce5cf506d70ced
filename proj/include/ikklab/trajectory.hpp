// Time-indexed snapshots plus the event log every diagnostic consumes.
#pragma once

#include "field.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ikklab {

struct ClampEvent {
    double time = 0.0;
    int index = 0;
    double magnitude = 0.0; // overshoot beyond the admissible bound
};

struct StepReport {
    double max_abs = 0.0;
    int clamp_count = 0;
    double explicit_magnitude = 0.0; // L2 size of the explicit update
    double cfl_ratio = 0.0;
    bool saturated = false; // every grid point clamped; mass cannot be held
};

struct TrajMeta {
    std::string model;       // "ikk", "ch", "skeleton_ikk", "skeleton_ch"
    double gamma = 1.0;
    double delta = 0.1;
    double a = -1.0;
    double epsilon = 1.0;
    double dt = 0.0;
    double horizon = 0.0;
    int n_points = 0;
    int truncation = 0;
    int stride = 1;
    uint64_t seed = 0;
    uint32_t replicate = 0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Field> snapshots;
    std::vector<ClampEvent> events;
    TrajMeta meta;

    int n_snapshots() const { return int(snapshots.size()); }
};

// || a - b ||_{L^2([0,T]; L^2)} by trapezoid in time over matched snapshots.
inline double l2l2_distance(const Trajectory& a, const Trajectory& b) {
    if (a.n_snapshots() != b.n_snapshots() || a.n_snapshots() < 2)
        throw std::invalid_argument("l2l2_distance: trajectories must share a snapshot grid");
    double acc = 0.0;
    for (int m = 0; m + 1 < a.n_snapshots(); ++m) {
        const double dt = a.times[size_t(m + 1)] - a.times[size_t(m)];
        const double f0 = [&] {
            const Field d = a.snapshots[size_t(m)] - b.snapshots[size_t(m)];
            const double v = l2_norm(d);
            return v * v;
        }();
        const double f1 = [&] {
            const Field d = a.snapshots[size_t(m + 1)] - b.snapshots[size_t(m + 1)];
            const double v = l2_norm(d);
            return v * v;
        }();
        acc += 0.5 * dt * (f0 + f1);
    }
    return std::sqrt(acc);
}

// Same quadrature against an identically-zero reference.
inline double l2l2_norm(const Trajectory& a) {
    double acc = 0.0;
    for (int m = 0; m + 1 < a.n_snapshots(); ++m) {
        const double dt = a.times[size_t(m + 1)] - a.times[size_t(m)];
        const double f0 = l2_norm(a.snapshots[size_t(m)]);
        const double f1 = l2_norm(a.snapshots[size_t(m + 1)]);
        acc += 0.5 * dt * (f0 * f0 + f1 * f1);
    }
    return std::sqrt(acc);
}

} // namespace ikklab
