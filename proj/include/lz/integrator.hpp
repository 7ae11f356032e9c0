#pragma once
// Adaptive Dormand-Prince 5(4) integration of the two-level equations with
// dense output. The stepper works on the rotating-frame amplitudes
//   A = a e^{-i eps tau^2/2},  B = b e^{i eps tau^2/2},
//   A' = -i B e^{-i eps tau^2},  B' = -i A e^{i eps tau^2},
// carried as four real components. The chirp phase is then exact and the
// local errors no longer scale with eps |tau|, which keeps the norm drift
// over ~10^5 steps at the 1e-10 level.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "lz/core.hpp"

namespace lz {

struct SolverOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    std::size_t max_steps = 50'000'000;
    // Times at which dense output is recorded; empty means both end points.
    std::vector<double> sample_grid;
};

// (da/dtau, db/dtau) = (i eps tau a - i b, -i eps tau b - i a).
inline Amplitudes rhs(double tau, const Amplitudes& y, double epsilon) {
    constexpr cplx I{0.0, 1.0};
    const double chirp = epsilon * tau;
    return {I * chirp * y.a - I * y.b, -I * chirp * y.b - I * y.a};
}

namespace detail {

using State = std::array<double, 4>;

inline State pack(const Amplitudes& y) { return {y.a.real(), y.a.imag(), y.b.real(), y.b.imag()}; }

inline State rhs_real(double tau, const State& y, double epsilon) {
    const double th = epsilon * tau * tau;
    const double c = std::cos(th), s = std::sin(th);
    // A' = -i B e^{-i th}, B' = -i A e^{i th}
    return {y[3] * c - y[2] * s, -(y[2] * c + y[3] * s), y[1] * c + y[0] * s, -(y[0] * c - y[1] * s)};
}

// a = A e^{i eps tau^2/2}, b = B e^{-i eps tau^2/2}
inline Amplitudes from_frame(double tau, const State& y, double epsilon) {
    const cplx rot = std::polar(1.0, 0.5 * epsilon * tau * tau);
    return {cplx{y[0], y[1]} * rot, cplx{y[2], y[3]} * std::conj(rot)};
}

inline State to_frame(double tau, const Amplitudes& amps, double epsilon) {
    const cplx rot = std::polar(1.0, 0.5 * epsilon * tau * tau);
    return pack({amps.a * std::conj(rot), amps.b * rot});
}

// Dormand-Prince 5(4) tableau.
struct Dopri5 {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                            a75 = -2187.0 / 6784, a76 = 11.0 / 84;
    // y5 - y4
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    // Hairer's continuous extension
    static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
};

// Step-size ceiling resolving the local oscillation frequency ~ eps |tau|.
inline double step_cap(double tau_abs, double epsilon) {
    return std::min(0.1, 0.5 / (epsilon * tau_abs + 1.0));
}

// Per-step errors add up over hundreds of steps; holding each one to a quarter of the
// tolerance keeps the global error of an O(1)-length run within rtol.
inline constexpr double local_tol_fraction = 0.25;

inline double wrap_pi(double x) { return std::remainder(x, 2.0 * pi); }

}  // namespace detail

// Integrates from tau_start to tau_end (either direction) starting at `initial`.
// Samples are taken at opts.sample_grid, which must be monotone in the direction
// of integration and lie inside the interval.
inline Trajectory propagate(double epsilon, double tau_start, double tau_end, const Amplitudes& initial,
                            const SolverOptions& opts) {
    using namespace detail;
    using T = Dopri5;

    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw DomainError("epsilon must be >= 0");
    if (!(opts.rtol > 0.0) || !(opts.atol > 0.0)) throw DomainError("rtol and atol must be positive");
    if (!std::isfinite(tau_start) || !std::isfinite(tau_end)) throw DomainError("non-finite time span");

    const double dir = tau_end >= tau_start ? 1.0 : -1.0;
    std::vector<double> grid = opts.sample_grid;
    if (grid.empty()) {
        grid = {tau_start};
        if (tau_end != tau_start) grid.push_back(tau_end);
    }
    const double lo = std::min(tau_start, tau_end), hi = std::max(tau_start, tau_end);
    const double slack = 1e-12 * std::max(1.0, hi - lo);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < lo - slack || grid[i] > hi + slack)
            throw DomainError("sample_grid point outside the integration interval");
        if (i > 0 && !(dir * (grid[i] - grid[i - 1]) > 0.0))
            throw DomainError("sample_grid must be strictly monotone along the integration direction");
    }

    Trajectory traj;
    traj.method = Method::numeric;
    traj.solver_meta.rtol = opts.rtol;
    traj.solver_meta.atol = opts.atol;
    traj.points.reserve(grid.size());

    State y = to_frame(tau_start, initial, epsilon);
    double t = tau_start;
    // unwrapped frame phases; lab phases are these plus the chirp +-eps tau^2/2 and a 2 pi k offset.
    // A vanishing initial amplitude has no phase of its own, so its offset only keeps the start near 0.
    double frame_phase_a = std::atan2(y[1], y[0]), frame_phase_b = std::atan2(y[3], y[2]);
    const double chirp0 = 0.5 * epsilon * tau_start * tau_start;
    auto anchor = [](double target, double raw) { return 2.0 * pi * std::round((target - raw) / (2.0 * pi)); };
    const double offset_a = anchor(initial.a == cplx{} ? 0.0 : std::arg(initial.a), frame_phase_a + chirp0);
    const double offset_b = anchor(initial.b == cplx{} ? 0.0 : std::arg(initial.b), frame_phase_b - chirp0);
    std::size_t next = 0;

    auto record = [&](double ts, const State& ys) {
        TrajectoryPoint p;
        p.tau = ts;
        p.amps = from_frame(ts, ys, epsilon);
        p.norm_error = norm_error(p.amps);
        const double chirp = 0.5 * epsilon * ts * ts;
        p.phase_a = offset_a + frame_phase_a + wrap_pi(std::atan2(ys[1], ys[0]) - std::atan2(y[1], y[0])) + chirp;
        p.phase_b = offset_b + frame_phase_b + wrap_pi(std::atan2(ys[3], ys[2]) - std::atan2(y[3], y[2])) - chirp;
        if (p.amps.a == cplx{}) p.phase_a = 2.0 * pi * std::round(p.phase_a / (2.0 * pi));
        if (p.amps.b == cplx{}) p.phase_b = 2.0 * pi * std::round(p.phase_b / (2.0 * pi));
        traj.points.push_back(p);
    };

    while (next < grid.size() && dir * (grid[next] - t) <= slack) {
        record(grid[next], y);
        ++next;
    }

    State k1 = rhs_real(t, y, epsilon), k2, k3, k4, k5, k6, k7;
    traj.solver_meta.rhs_evaluations = 1;
    double h = 0.1 * step_cap(std::abs(t), epsilon);
    double err_old = 1e-4;
    constexpr double safe = 0.9, beta = 0.04, expo = 0.2 - beta * 0.75;
    constexpr double fac_min = 0.2, fac_max = 10.0;
    std::size_t steps = 0;
    bool last_rejected = false;

    auto axpy = [](const State& base, double hh, std::initializer_list<std::pair<double, const State*>> terms) {
        State out = base;
        for (const auto& [coef, k] : terms)
            for (int i = 0; i < 4; ++i) out[i] += hh * coef * (*k)[i];
        return out;
    };

    while (dir * (tau_end - t) > 0.0) {
        if (steps >= opts.max_steps)
            throw StepLimitExceeded("max_steps (" + std::to_string(opts.max_steps) + ") reached at tau = " +
                                    std::to_string(t));
        ++steps;

        double cap = step_cap(std::abs(t), epsilon);
        h = std::min(h, cap);
        h = std::min(h, step_cap(std::abs(t + dir * h), epsilon));
        bool final_step = false;
        if (h >= std::abs(tau_end - t)) {
            h = std::abs(tau_end - t);
            final_step = true;
        }
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)))
            throw ToleranceFailure("step size underflow at tau = " + std::to_string(t));

        const double hs = dir * h;
        State y2 = axpy(y, hs, {{T::a21, &k1}});
        k2 = rhs_real(t + T::c2 * hs, y2, epsilon);
        State y3 = axpy(y, hs, {{T::a31, &k1}, {T::a32, &k2}});
        k3 = rhs_real(t + T::c3 * hs, y3, epsilon);
        State y4 = axpy(y, hs, {{T::a41, &k1}, {T::a42, &k2}, {T::a43, &k3}});
        k4 = rhs_real(t + T::c4 * hs, y4, epsilon);
        State y5 = axpy(y, hs, {{T::a51, &k1}, {T::a52, &k2}, {T::a53, &k3}, {T::a54, &k4}});
        k5 = rhs_real(t + T::c5 * hs, y5, epsilon);
        State y6 = axpy(y, hs, {{T::a61, &k1}, {T::a62, &k2}, {T::a63, &k3}, {T::a64, &k4}, {T::a65, &k5}});
        const double t_new = final_step ? tau_end : t + hs;
        k6 = rhs_real(t + hs, y6, epsilon);
        State y_new = axpy(y, hs, {{T::a71, &k1}, {T::a73, &k3}, {T::a74, &k4}, {T::a75, &k5}, {T::a76, &k6}});
        k7 = rhs_real(t_new, y_new, epsilon);
        traj.solver_meta.rhs_evaluations += 6;

        double err = 0.0, err_max = 0.0;
        for (int i = 0; i < 4; ++i) {
            const double e = hs * (T::e1 * k1[i] + T::e3 * k3[i] + T::e4 * k4[i] + T::e5 * k5[i] +
                                   T::e6 * k6[i] + T::e7 * k7[i]);
            const double sc = local_tol_fraction * (opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(y_new[i])));
            err += (e / sc) * (e / sc);
            err_max = std::max(err_max, std::abs(e));
        }
        err = std::sqrt(err / 4.0);
        if (!std::isfinite(err)) throw ToleranceFailure("non-finite error estimate at tau = " + std::to_string(t));

        const double fac11 = std::pow(err, expo);
        if (err <= 1.0) {
            // dense output coefficients
            State r2, r3, r4, r5;
            for (int i = 0; i < 4; ++i) {
                r2[i] = y_new[i] - y[i];
                r3[i] = hs * k1[i] - r2[i];
                r4[i] = r2[i] - hs * k7[i] - r3[i];
                r5[i] = hs * (T::d1 * k1[i] + T::d3 * k3[i] + T::d4 * k4[i] + T::d5 * k5[i] +
                              T::d6 * k6[i] + T::d7 * k7[i]);
            }
            while (next < grid.size() && dir * (grid[next] - t_new) <= slack) {
                const double theta = final_step && dir * (grid[next] - t_new) >= 0.0
                                         ? 1.0
                                         : std::clamp((grid[next] - t) / hs, 0.0, 1.0);
                const double theta1 = 1.0 - theta;
                State ys;
                for (int i = 0; i < 4; ++i)
                    ys[i] = y[i] + theta * (r2[i] + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i])));
                record(grid[next], ys);
                ++next;
            }
            frame_phase_a += wrap_pi(std::atan2(y_new[1], y_new[0]) - std::atan2(y[1], y[0]));
            frame_phase_b += wrap_pi(std::atan2(y_new[3], y_new[2]) - std::atan2(y[3], y[2]));

            y = y_new;
            k1 = k7;
            t = t_new;
            ++traj.solver_meta.accepted_steps;
            traj.solver_meta.accumulated_error += err_max;

            double fac = fac11 / std::pow(err_old, beta);
            fac = std::clamp(fac / safe, 1.0 / fac_max, 1.0 / fac_min);
            double h_new = h / fac;
            if (last_rejected) h_new = std::min(h_new, h);
            err_old = std::max(err, 1e-4);
            last_rejected = false;
            h = h_new;
        } else {
            h = h / std::min(1.0 / fac_min, fac11 / safe);
            ++traj.solver_meta.rejected_steps;
            last_rejected = true;
        }
    }
    // points that coincide with tau_end up to slack
    while (next < grid.size()) {
        record(grid[next], y);
        ++next;
    }
    return traj;
}

// Integrates from -tau0 to +tau0 with a(-tau0) = 1, b(-tau0) = 0.
inline Trajectory integrate(const LZConfig& config, const SolverOptions& opts) {
    if (!(config.epsilon >= 0.0)) throw DomainError("epsilon must be >= 0");
    if (!(config.tau0 >= 0.0)) throw DomainError("tau0 must be >= 0");
    Trajectory traj = propagate(config.epsilon, -config.tau0, config.tau0, Amplitudes{}, opts);
    traj.config = config;
    return traj;
}

struct SweepRow {
    LZConfig config;
    std::optional<Amplitudes> final_amps;  // empty when the row failed
    std::string error;                     // error kind and message of a failed row
};

// One integration per config; rows are independent and may run on `threads` workers.
inline std::vector<SweepRow> sweep(std::span<const LZConfig> configs, const SolverOptions& opts,
                                   unsigned threads = 1) {
    std::vector<SweepRow> rows(configs.size());
    SolverOptions row_opts = opts;
    row_opts.sample_grid.clear();

    auto run_row = [&](std::size_t i) {
        rows[i].config = configs[i];
        try {
            const Trajectory tr = integrate(configs[i], row_opts);
            rows[i].final_amps = tr.points.back().amps;
        } catch (const Error& e) {
            rows[i].error = std::string(e.kind()) + ": " + e.what();
        }
    };

    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(configs.size())));
    if (threads <= 1) {
        for (std::size_t i = 0; i < configs.size(); ++i) run_row(i);
        return rows;
    }
    std::atomic<std::size_t> counter{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = counter++; i < configs.size(); i = counter++) run_row(i);
        });
    pool.clear();
    return rows;
}

}  // namespace lz
