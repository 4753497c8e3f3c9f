#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>

#include "qgraph/error.hpp"
#include "qgraph/types.hpp"

namespace qgraph {

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-10;
    std::size_t max_steps = 2'000'000;
    double initial_step = 0.0;  // 0: pick from the interval length
};

struct OdeStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
};

template <std::size_t N>
using OdeState = std::array<Complex, N>;

/// Adaptive Dormand-Prince 5(4) integration of y' = f(x, y) from x0 to x1 for a
/// complex state of fixed size. Steps are clipped to land exactly on every
/// checkpoint in (x0, x1] (ascending), where observer(x, y) is called; the
/// observer is also called at x1. Throws NumericalError when the step budget
/// runs out or the step size underflows.
template <std::size_t N, class Rhs, class Observer>
OdeStats integrate_dopri5(Rhs&& f, double x0, double x1, OdeState<N>& y, std::span<const double> checkpoints,
                          Observer&& observer, const OdeOptions& opts = {}) {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;

    OdeStats stats;
    const double span = x1 - x0;
    if (span <= 0.0) {
        observer(x1, y);
        return stats;
    }
    double h = opts.initial_step > 0.0 ? opts.initial_step : span / 64.0;
    double x = x0;
    std::size_t next_checkpoint = 0;
    while (next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] <= x0) ++next_checkpoint;

    OdeState<N> k1, k2, k3, k4, k5, k6, k7, tmp, y_new;
    f(x, y, k1);
    double err_prev = 1e-4;

    while (x < x1) {
        double target = x1;
        if (next_checkpoint < checkpoints.size()) target = std::min(target, checkpoints[next_checkpoint]);
        bool lands = false;
        const double h_natural = h;
        if (x + h >= target) {
            h = target - x;
            lands = true;
        }
        if (h <= 1e-15 * std::max(1.0, std::abs(x))) {
            if (lands) {
                // already at the target up to rounding
                x = target;
            } else {
                throw NumericalError("ODE step size underflow");
            }
        } else {
            for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
            f(x + c2 * h, tmp, k2);
            for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
            f(x + c3 * h, tmp, k3);
            for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            f(x + c4 * h, tmp, k4);
            for (std::size_t i = 0; i < N; ++i) {
                tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            }
            f(x + c5 * h, tmp, k5);
            for (std::size_t i = 0; i < N; ++i) {
                tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
            }
            f(x + h, tmp, k6);
            for (std::size_t i = 0; i < N; ++i) {
                y_new[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
            }
            f(x + h, y_new, k7);

            double err = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                const Complex e =
                    h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                const double scale = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
                err = std::max(err, std::abs(e) / scale);
            }

            if (err <= 1.0) {
                ++stats.accepted;
                x = lands ? target : x + h;
                y = y_new;
                k1 = k7;  // FSAL
                // PI step-size controller
                double factor = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
                factor = std::clamp(factor, 0.2, 5.0);
                err_prev = std::max(err, 1e-4);
                h = lands ? std::max(h_natural, h * factor) : h * factor;
            } else {
                ++stats.rejected;
                lands = false;
                h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
            }
            if (stats.accepted + stats.rejected > opts.max_steps) {
                throw NumericalError("ODE tolerance not reached within the step budget");
            }
        }
        if (lands) {
            if (next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] <= x) {
                while (next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] <= x) ++next_checkpoint;
                observer(x, y);
            } else if (x >= x1) {
                observer(x1, y);
            }
        }
    }
    return stats;
}

}  // namespace qgraph
