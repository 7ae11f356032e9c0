#pragma once
// Grids, trajectory builders for every method, CSV/JSON export, envelope fits,
// method comparison, figure data and the command runner used by the CLI.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "lz/asymptotics.hpp"
#include "lz/core.hpp"
#include "lz/integrator.hpp"
#include "lz/pcf.hpp"
#include "lz/wkb.hpp"

namespace lz {

inline constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

// ---------------------------------------------------------------- grids

enum class GridKind { linear, log_symmetric };

struct GridSpec {
    GridKind kind = GridKind::linear;
    std::size_t count = 201;
    double tmin = 1e-3;  // smallest |tau| of a log-symmetric grid
};

// Default grid for the figure data.
inline GridSpec figure_grid() { return {GridKind::log_symmetric, 2000, 1e-3}; }

// Strictly increasing samples in [-tau0, tau0]. A log-symmetric grid holds count/2
// log-spaced points on [tmin, tau0] and their mirror images.
inline std::vector<double> make_grid(const GridSpec& g, double tau0) {
    if (!(tau0 > 0.0) || !std::isfinite(tau0)) throw DomainError("grid requires tau0 > 0");
    std::vector<double> out;
    if (g.kind == GridKind::linear) {
        if (g.count < 2) throw DomainError("linear grid needs at least 2 points");
        out.resize(g.count);
        for (std::size_t i = 0; i < g.count; ++i)
            out[i] = -tau0 + 2.0 * tau0 * static_cast<double>(i) / static_cast<double>(g.count - 1);
        out.back() = tau0;
        return out;
    }
    const std::size_t n = g.count / 2;
    if (n < 2) throw DomainError("log-symmetric grid needs at least 4 points");
    if (!(g.tmin > 0.0) || !(g.tmin < tau0)) throw DomainError("log-symmetric grid needs 0 < tmin < tau0");
    std::vector<double> pos(n);
    const double l0 = std::log(g.tmin), l1 = std::log(tau0);
    for (std::size_t i = 0; i < n; ++i)
        pos[i] = std::exp(l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(n - 1));
    pos.front() = g.tmin;
    pos.back() = tau0;
    out.reserve(2 * n);
    for (auto it = pos.rbegin(); it != pos.rend(); ++it) out.push_back(-*it);
    out.insert(out.end(), pos.begin(), pos.end());
    return out;
}

// ---------------------------------------------------------------- trajectories

inline Trajectory numeric_trajectory(const LZConfig& c, std::span<const double> grid, SolverOptions opts) {
    opts.sample_grid.assign(grid.begin(), grid.end());
    return integrate(c, opts);
}

inline Trajectory exact_trajectory(const LZConfig& c, std::span<const double> grid) {
    const ExactSolution ex(c);
    std::vector<Amplitudes> amps;
    amps.reserve(grid.size());
    for (double t : grid) amps.push_back(ex.amplitudes(t));
    Trajectory tr;
    tr.config = c;
    tr.method = Method::exact_pcf;
    tr.points = make_points(grid, amps);
    return tr;
}

namespace detail {

inline Trajectory assemble(const LZConfig& c, Method m, const std::vector<double>& taus,
                           const std::vector<Amplitudes>& amps) {
    Trajectory tr;
    tr.config = c;
    tr.method = m;
    tr.points = make_points(taus, amps);
    return tr;
}

}  // namespace detail

// Negative-time superposition on the grid points with -tau0 <= tau <= -tau_min.
inline Trajectory asymptotic_negative_trajectory(const LZConfig& c, std::span<const double> grid) {
    std::vector<double> taus;
    std::vector<Amplitudes> amps;
    for (double t : grid)
        if (t <= -tau_min) {
            taus.push_back(t);
            amps.push_back(amplitudes_negative(-t, c));
        }
    return detail::assemble(c, Method::asymptotic_negative, taus, amps);
}

// Positive-time superposition on the grid points with tau_min <= tau <= tau0.
inline Trajectory asymptotic_positive_trajectory(const LZConfig& c, std::span<const double> grid,
                                                 const MatchingCoefficients& k,
                                                 PositiveForm form = PositiveForm::leading) {
    std::vector<double> taus;
    std::vector<Amplitudes> amps;
    for (double t : grid)
        if (t >= tau_min) {
            taus.push_back(t);
            amps.push_back(amplitudes_positive(t, c, k, form));
        }
    return detail::assemble(c, Method::asymptotic_positive, taus, amps);
}

// exp(i delta_phi) before the crossing and its upper-branch continuation after it.
// The heuristic says nothing about b, which is reported as NaN.
inline Trajectory heuristic_trajectory(const LZConfig& c, std::span<const double> grid) {
    std::vector<double> taus;
    std::vector<Amplitudes> amps;
    for (double t : grid) {
        if (std::abs(t) < tau_min) continue;
        taus.push_back(t);
        const cplx a = t < 0.0 ? amplitude_a_negative_leading(-t, c) : heuristic_positive_a(t, c);
        amps.push_back({a, cplx{nan_value, nan_value}});
    }
    return detail::assemble(c, Method::heuristic, taus, amps);
}

// Positive-time superposition with the WKB waves u+ and u- standing in for f and f*/(2 eps tau).
inline Trajectory wkb_trajectory(const LZConfig& c, std::span<const double> grid, const MatchingCoefficients& k,
                                 WkbAmplitude amplitude = WkbAmplitude::full) {
    require_asymptotic_config(c);
    const double L = detail::lz_factor(c.epsilon);
    const cplx f0 = elementary_wave_f(c.tau0, c.epsilon);
    const cplx cf = k.gamma * L / f0, cg = k.delta / L / f0;
    std::vector<double> taus;
    std::vector<Amplitudes> amps;
    for (double t : grid) {
        if (t < tau_min) continue;
        const cplx up = wkb_wave(WkbSign::plus, t, c.epsilon, amplitude);
        const cplx um = wkb_wave(WkbSign::minus, t, c.epsilon, amplitude);
        const double two_et = 2.0 * c.epsilon * t;
        taus.push_back(t);
        amps.push_back({cf * up + cg * um, cg * two_et * um - cf * up / two_et});
    }
    return detail::assemble(c, Method::wkb, taus, amps);
}

// Trajectory of any method on a grid; the positive-time methods use the PCF coefficients.
inline Trajectory trajectory_for(Method m, const LZConfig& c, std::span<const double> grid,
                                 const SolverOptions& opts) {
    switch (m) {
        case Method::numeric: return numeric_trajectory(c, grid, opts);
        case Method::exact_pcf: return exact_trajectory(c, grid);
        case Method::asymptotic_negative: return asymptotic_negative_trajectory(c, grid);
        case Method::asymptotic_positive:
            return asymptotic_positive_trajectory(c, grid, matching_coeffs(c.epsilon));
        case Method::heuristic: return heuristic_trajectory(c, grid);
        case Method::wkb: return wkb_trajectory(c, grid, matching_coeffs(c.epsilon));
    }
    throw DomainError("unknown method");
}

inline Method parse_method(std::string_view s) {
    for (Method m : {Method::numeric, Method::asymptotic_negative, Method::asymptotic_positive, Method::heuristic,
                     Method::exact_pcf, Method::wkb})
        if (to_string(m) == s) return m;
    if (s == "exact") return Method::exact_pcf;
    throw DomainError("unknown method '" + std::string(s) + "'");
}

// ---------------------------------------------------------------- CSV / JSON

inline constexpr const char* csv_header = "tau,re_a,im_a,abs_a,phase_a,re_b,im_b,abs_b,phase_b,norm_err";

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_csv(std::ostream& os, std::span<const TrajectoryPoint> points) {
    os << csv_header << '\n';
    for (const auto& p : points) {
        const double vals[] = {p.tau,        p.amps.a.real(), p.amps.a.imag(), std::abs(p.amps.a), p.phase_a,
                               p.amps.b.real(), p.amps.b.imag(), std::abs(p.amps.b), p.phase_b,       p.norm_error};
        for (std::size_t i = 0; i < std::size(vals); ++i) os << (i ? "," : "") << format_double(vals[i]);
        os << '\n';
    }
}

inline void write_csv(std::ostream& os, const Trajectory& tr) { write_csv(os, std::span(tr.points)); }

inline std::vector<TrajectoryPoint> parse_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != csv_header) throw IoError("CSV header mismatch");
    std::vector<TrajectoryPoint> out;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        double v[10];
        const char* p = line.c_str();
        for (int i = 0; i < 10; ++i) {
            char* end = nullptr;
            v[i] = std::strtod(p, &end);
            if (end == p || (i < 9 && *end != ',') || (i == 9 && *end != '\0'))
                throw IoError("malformed CSV line " + std::to_string(lineno));
            p = end + 1;
        }
        TrajectoryPoint tp;
        tp.tau = v[0];
        tp.amps = {{v[1], v[2]}, {v[5], v[6]}};
        tp.phase_a = v[4];
        tp.phase_b = v[8];
        tp.norm_error = v[9];
        out.push_back(tp);
    }
    return out;
}

inline nlohmann::json to_json(const SolverMeta& m) {
    return {{"rtol", m.rtol},
            {"atol", m.atol},
            {"accepted_steps", m.accepted_steps},
            {"rejected_steps", m.rejected_steps},
            {"rhs_evaluations", m.rhs_evaluations},
            {"accumulated_error", m.accumulated_error}};
}

inline nlohmann::json to_json(const Trajectory& tr) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : tr.points)
        pts.push_back({{"tau", p.tau},
                       {"re_a", p.amps.a.real()},
                       {"im_a", p.amps.a.imag()},
                       {"abs_a", std::abs(p.amps.a)},
                       {"phase_a", p.phase_a},
                       {"re_b", p.amps.b.real()},
                       {"im_b", p.amps.b.imag()},
                       {"abs_b", std::abs(p.amps.b)},
                       {"phase_b", p.phase_b},
                       {"norm_err", p.norm_error}});
    nlohmann::json j = {{"config", {{"epsilon", tr.config.epsilon}, {"tau0", tr.config.tau0}}},
                        {"method", std::string(to_string(tr.method))},
                        {"points", std::move(pts)}};
    if (tr.method == Method::numeric) j["solver_meta"] = to_json(tr.solver_meta);
    return j;
}

// ---------------------------------------------------------------- envelope fit

struct EnvelopeFit {
    double exponent = 0.0;
    double amplitude = 0.0;  // exp(intercept) of log g = exponent log tau + intercept
    std::size_t maxima = 0;
};

// Fits log(max of ||a| - reference|) against log tau over the local maxima inside
// [tau_lo, tau_hi]. Each maximum is refined by a parabola through its neighbours.
inline EnvelopeFit fit_envelope(const Trajectory& tr, double reference, double tau_lo = tau_min,
                                double tau_hi = std::numeric_limits<double>::infinity()) {
    std::vector<double> t, g;
    for (const auto& p : tr.points)
        if (p.tau >= tau_lo && p.tau <= tau_hi && p.tau > 0.0) {
            t.push_back(p.tau);
            g.push_back(std::abs(std::abs(p.amps.a) - reference));
        }
    std::vector<double> lx, ly;
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
        if (!(g[i] > g[i - 1] && g[i] >= g[i + 1])) continue;
        double tv = t[i], gv = g[i];
        const double h1 = t[i] - t[i - 1], h2 = t[i + 1] - t[i];
        if (std::abs(h1 - h2) <= 1e-9 * h1) {
            const double den = g[i - 1] - 2.0 * g[i] + g[i + 1];
            if (den < 0.0) {
                const double s = 0.5 * (g[i - 1] - g[i + 1]) / den;
                tv = t[i] + s * h1;
                gv = g[i] - 0.25 * (g[i - 1] - g[i + 1]) * s;
            }
        }
        if (gv > 0.0) {
            lx.push_back(std::log(tv));
            ly.push_back(std::log(gv));
        }
    }
    if (lx.size() < 5)
        throw InsufficientOscillations("fit_envelope: " + std::to_string(lx.size()) + " maxima found, need 5");
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double den = n * sxx - sx * sx;
    if (!(den > 0.0)) throw InsufficientOscillations("fit_envelope: maxima do not span a tau range");
    EnvelopeFit fit;
    fit.exponent = (n * sxy - sx * sy) / den;
    fit.amplitude = std::exp((sy - fit.exponent * sx) / n);
    fit.maxima = lx.size();
    return fit;
}

// Uniform samples on [tau_lo, tau_hi] fine enough to resolve the Stueckelberg
// oscillation (angular frequency 2 eps tau) with 0.3 rad per sample.
inline std::vector<double> oscillation_grid(double epsilon, double tau_lo, double tau_hi) {
    const double dt = 0.3 / (2.0 * epsilon * tau_hi + 1.0);
    const auto n = static_cast<std::size_t>(std::ceil((tau_hi - tau_lo) / dt)) + 1;
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = tau_lo + (tau_hi - tau_lo) * static_cast<double>(i) / (n - 1.0);
    g.back() = tau_hi;
    return g;
}

// ---------------------------------------------------------------- comparison

struct CompareReport {
    Method reference = Method::numeric;
    Method candidate = Method::exact_pcf;
    std::size_t points_compared = 0;
    double max_abs_error_a = 0.0;  // max over the grid of max(|Re da|, |Im da|)
    double max_abs_error_b = 0.0;
    double max_norm_error = 0.0;
    std::optional<double> envelope_exponent;  // absent with fewer than 5 maxima
    std::optional<double> phase_b_check;      // |arg b(tau0) - phi_b(tau0)| reduced mod 2 pi
};

namespace detail {

inline double component_error(cplx x, cplx y) {
    const cplx d = x - y;
    return std::max(std::abs(d.real()), std::abs(d.imag()));
}

}  // namespace detail

// Compares two methods on their common grid points. The envelope exponent is fitted on a
// dense grid over [10, tau0] for whichever of the two methods covers positive times
// (numeric preferred), against the oscillation centre of the four-term positive-time form.
inline CompareReport compare(const LZConfig& c, Method reference, Method candidate, const GridSpec& gs,
                             const SolverOptions& opts) {
    require_asymptotic_config(c);
    const std::vector<double> grid = make_grid(gs, c.tau0);
    const Trajectory ta = trajectory_for(reference, c, grid, opts);
    const Trajectory tb = trajectory_for(candidate, c, grid, opts);

    CompareReport r;
    r.reference = reference;
    r.candidate = candidate;
    std::size_t i = 0, j = 0;
    while (i < ta.points.size() && j < tb.points.size()) {
        const auto& p = ta.points[i];
        const auto& q = tb.points[j];
        if (p.tau < q.tau) { ++i; continue; }
        if (q.tau < p.tau) { ++j; continue; }
        ++r.points_compared;
        r.max_abs_error_a = std::max(r.max_abs_error_a, detail::component_error(p.amps.a, q.amps.a));
        const double eb = detail::component_error(p.amps.b, q.amps.b);
        if (std::isfinite(eb)) r.max_abs_error_b = std::max(r.max_abs_error_b, eb);
        ++i;
        ++j;
    }
    for (const Trajectory* t : {&ta, &tb})
        for (const auto& p : t->points)
            if (std::isfinite(p.norm_error)) r.max_norm_error = std::max(r.max_norm_error, p.norm_error);

    // phase of b at +tau0 from the first method that has it
    const double phi_b = phase_b_closed_form(c);
    for (const Trajectory* t : {&ta, &tb}) {
        if (t->points.empty() || t->points.back().tau != c.tau0) continue;
        const cplx b = t->points.back().amps.b;
        if (!std::isfinite(b.real())) continue;
        r.phase_b_check = std::abs(std::remainder(std::arg(b) - phi_b, 2.0 * pi));
        break;
    }

    const double lo = 10.0;
    if (c.tau0 > lo) {
        Method env = Method::numeric;
        if (reference != Method::numeric && candidate != Method::numeric) {
            env = reference;
            if (env == Method::asymptotic_negative || env == Method::heuristic) env = candidate;
        }
        if (env != Method::asymptotic_negative && env != Method::heuristic) {
            const auto dense = oscillation_grid(c.epsilon, lo, c.tau0);
            const Trajectory td = trajectory_for(env, c, dense, opts);
            try {
                r.envelope_exponent =
                    fit_envelope(td, oscillation_center(c, matching_coeffs(c.epsilon)), lo, c.tau0).exponent;
            } catch (const InsufficientOscillations&) {
            }
        }
    }
    return r;
}

inline nlohmann::json to_json(const CompareReport& r, const LZConfig& c) {
    nlohmann::json j = {{"config", {{"epsilon", c.epsilon}, {"tau0", c.tau0}}},
                        {"reference", std::string(to_string(r.reference))},
                        {"candidate", std::string(to_string(r.candidate))},
                        {"points_compared", r.points_compared},
                        {"max_abs_error_a", r.max_abs_error_a},
                        {"max_abs_error_b", r.max_abs_error_b},
                        {"max_norm_error", r.max_norm_error}};
    j["envelope_exponent"] = r.envelope_exponent ? nlohmann::json(*r.envelope_exponent) : nlohmann::json(nullptr);
    j["phase_b_check"] = r.phase_b_check ? nlohmann::json(*r.phase_b_check) : nlohmann::json(nullptr);
    return j;
}

// ---------------------------------------------------------------- figure data

// A numeric table with named columns.
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

inline void write_csv(std::ostream& os, const Table& t) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_double(r[i]);
        os << '\n';
    }
}

inline nlohmann::json to_json(const Table& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : t.rows) rows.push_back(r);
    return {{"name", t.name}, {"columns", t.columns}, {"rows", std::move(rows)}};
}

// |a|, |b| and the unwrapped phases of the numeric solution.
inline Table figure1(const LZConfig& c, std::span<const double> grid, const SolverOptions& opts) {
    const Trajectory tr = numeric_trajectory(c, grid, opts);
    Table t{"fig1", {"tau", "abs_a", "abs_b", "phase_a", "phase_b"}, {}};
    for (const auto& p : tr.points) t.rows.push_back({p.tau, std::abs(p.amps.a), std::abs(p.amps.b), p.phase_a, p.phase_b});
    return t;
}

// a and b in the complex plane.
inline Table figure2(const LZConfig& c, std::span<const double> grid, const SolverOptions& opts) {
    const Trajectory tr = numeric_trajectory(c, grid, opts);
    Table t{"fig2", {"tau", "re_a", "im_a", "re_b", "im_b"}, {}};
    for (const auto& p : tr.points)
        t.rows.push_back({p.tau, p.amps.a.real(), p.amps.a.imag(), p.amps.b.real(), p.amps.b.imag()});
    return t;
}

// Numeric moduli against the negative- and positive-time superpositions (NaN inside |tau| < tau_min).
inline Table figure3(const LZConfig& c, std::span<const double> grid, const SolverOptions& opts) {
    const Trajectory tr = numeric_trajectory(c, grid, opts);
    const MatchingCoefficients k = matching_coeffs(c.epsilon);
    Table t{"fig3", {"tau", "abs_a_numeric", "abs_b_numeric", "abs_a_asymptotic", "abs_b_asymptotic"}, {}};
    for (const auto& p : tr.points) {
        Amplitudes as{{nan_value, nan_value}, {nan_value, nan_value}};
        if (p.tau <= -tau_min)
            as = amplitudes_negative(-p.tau, c);
        else if (p.tau >= tau_min)
            as = amplitudes_positive(p.tau, c, k);
        t.rows.push_back({p.tau, std::abs(p.amps.a), std::abs(p.amps.b), std::abs(as.a), std::abs(as.b)});
    }
    return t;
}

// For tau < 0: delta_phi and its rate against the unwrapped numeric phase of a and its
// rate d arg a / dtau = eps tau - Re(b/a).
inline Table figure4(const LZConfig& c, std::span<const double> grid, const SolverOptions& opts) {
    const Trajectory tr = numeric_trajectory(c, grid, opts);
    Table t{"fig4", {"tau", "delta_phi", "delta_phi_rate", "exact_phase", "exact_phase_rate"}, {}};
    for (const auto& p : tr.points) {
        if (p.tau > -tau_min) continue;
        const double ta = -p.tau;
        const double rate = c.epsilon * p.tau - (p.amps.b / p.amps.a).real();
        t.rows.push_back({p.tau, delta_phi(ta, c), delta_phi_rate(ta, c), p.phase_a, rate});
    }
    return t;
}

// ---------------------------------------------------------------- runner

enum class Command { simulate, exact, asymptotic, wkb, compare, figures, sweep };
enum class Format { csv, json };
enum class Side { negative, positive, both };

struct RunSpec {
    Command command = Command::simulate;
    LZConfig config;
    SolverOptions opts;
    GridSpec grid;
    std::string output_path;  // empty: standard output; a directory for figures
    Format format = Format::csv;

    std::vector<Method> methods{Method::exact_pcf, Method::numeric};  // compare: reference, candidate
    Side side = Side::both;                                           // asymptotic
    PositiveForm form = PositiveForm::leading;                        // asymptotic
    WkbAmplitude wkb_amplitude = WkbAmplitude::full;                  // wkb
    std::string which = "all";                                        // figures: 1..4 or all
    std::vector<double> sweep_epsilons;
    std::vector<double> sweep_tau0s;
    unsigned threads = 1;
};

inline int exit_code_for(const Error& e) {
    if (dynamic_cast<const IoError*>(&e)) return 4;
    if (dynamic_cast<const DomainError*>(&e)) return 2;
    return 3;
}

inline void write_error_record(std::ostream& err, std::string_view kind, std::string_view message, int code) {
    err << nlohmann::json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
}

namespace detail {

template <class Writer>
void emit(const std::string& path, std::ostream& fallback, Writer&& writer) {
    if (path.empty()) {
        writer(fallback);
        fallback.flush();
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    writer(f);
    f.flush();
    if (!f) throw IoError("write to '" + path + "' failed");
}

inline void emit_trajectories(const RunSpec& s, std::ostream& out, const std::vector<Trajectory>& trs) {
    emit(s.output_path, out, [&](std::ostream& os) {
        if (s.format == Format::json) {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& t : trs) arr.push_back(to_json(t));
            os << nlohmann::json{{"trajectories", std::move(arr)}}.dump(1) << '\n';
            return;
        }
        std::vector<TrajectoryPoint> all;
        for (const auto& t : trs) all.insert(all.end(), t.points.begin(), t.points.end());
        write_csv(os, std::span<const TrajectoryPoint>(all));
    });
}

inline void run_sweep(const RunSpec& s, std::ostream& out, std::ostream& err, int& status) {
    std::vector<LZConfig> configs;
    const auto eps = s.sweep_epsilons.empty() ? std::vector<double>{s.config.epsilon} : s.sweep_epsilons;
    const auto t0s = s.sweep_tau0s.empty() ? std::vector<double>{s.config.tau0} : s.sweep_tau0s;
    for (double e : eps)
        for (double t : t0s) configs.push_back({e, t});
    const auto rows = sweep(configs, s.opts, s.threads);

    std::size_t failed = 0;
    emit(s.output_path, out, [&](std::ostream& os) {
        if (s.format == Format::json) {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& r : rows) {
                nlohmann::json j = {{"epsilon", r.config.epsilon}, {"tau0", r.config.tau0}};
                if (r.final_amps) {
                    const auto& a = *r.final_amps;
                    j["re_a"] = a.a.real(); j["im_a"] = a.a.imag(); j["abs_a"] = std::abs(a.a);
                    j["re_b"] = a.b.real(); j["im_b"] = a.b.imag(); j["abs_b"] = std::abs(a.b);
                    j["error"] = nullptr;
                } else {
                    j["error"] = r.error;
                }
                arr.push_back(std::move(j));
            }
            os << nlohmann::json{{"rows", std::move(arr)}}.dump(1) << '\n';
        } else {
            os << "epsilon,tau0,re_a,im_a,abs_a,re_b,im_b,abs_b,error\n";
            for (const auto& r : rows) {
                const Amplitudes a = r.final_amps.value_or(Amplitudes{{nan_value, nan_value}, {nan_value, nan_value}});
                const double v[] = {r.config.epsilon, r.config.tau0, a.a.real(), a.a.imag(), std::abs(a.a),
                                    a.b.real(),       a.b.imag(),    std::abs(a.b)};
                for (double x : v) os << format_double(x) << ',';
                std::string msg = r.error;
                std::replace(msg.begin(), msg.end(), ',', ';');
                os << msg << '\n';
            }
        }
    });
    for (const auto& r : rows)
        if (!r.final_amps) ++failed;
    if (failed) {
        write_error_record(err, "sweep_rows_failed", std::to_string(failed) + " of " + std::to_string(rows.size()) +
                                                         " rows failed; see the error column", 3);
        status = 3;
    }
}

inline void run_figures(const RunSpec& s) {
    namespace fs = std::filesystem;
    const fs::path dir = s.output_path.empty() ? fs::path("figures") : fs::path(s.output_path);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir.string() + "'");
    const std::vector<double> grid = make_grid(s.grid, s.config.tau0);
    const bool all = s.which == "all";
    if (!all && (s.which.size() != 1 || s.which[0] < '1' || s.which[0] > '4'))
        throw DomainError("--which must be 1, 2, 3, 4 or all");
    using Maker = Table (*)(const LZConfig&, std::span<const double>, const SolverOptions&);
    const Maker makers[] = {figure1, figure2, figure3, figure4};
    for (int i = 0; i < 4; ++i) {
        if (!all && s.which[0] - '1' != i) continue;
        const Table t = makers[i](s.config, grid, s.opts);
        const std::string file = (dir / (t.name + (s.format == Format::json ? ".json" : ".csv"))).string();
        std::ostringstream unused;
        emit(file, unused, [&](std::ostream& os) {
            if (s.format == Format::json)
                os << to_json(t).dump(1) << '\n';
            else
                write_csv(os, t);
        });
    }
}

}  // namespace detail

// Executes one command. Returns the process exit status: 0 success, 2 usage or domain
// error, 3 numeric failure, 4 I/O failure; failures also write a JSON record to `err`.
inline int run(const RunSpec& s, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    try {
        int status = 0;
        const bool needs_asymptotic = s.command != Command::simulate && s.command != Command::sweep;
        if (needs_asymptotic) require_asymptotic_config(s.config);
        switch (s.command) {
            case Command::simulate: {
                const auto grid = make_grid(s.grid, s.config.tau0);
                detail::emit_trajectories(s, out, {numeric_trajectory(s.config, grid, s.opts)});
                break;
            }
            case Command::exact: {
                const auto grid = make_grid(s.grid, s.config.tau0);
                detail::emit_trajectories(s, out, {exact_trajectory(s.config, grid)});
                break;
            }
            case Command::asymptotic: {
                const auto grid = make_grid(s.grid, s.config.tau0);
                std::vector<Trajectory> trs;
                if (s.side != Side::positive) trs.push_back(asymptotic_negative_trajectory(s.config, grid));
                if (s.side != Side::negative)
                    trs.push_back(asymptotic_positive_trajectory(s.config, grid, matching_coeffs(s.config.epsilon), s.form));
                detail::emit_trajectories(s, out, trs);
                break;
            }
            case Command::wkb: {
                const auto grid = make_grid(s.grid, s.config.tau0);
                detail::emit_trajectories(
                    s, out, {wkb_trajectory(s.config, grid, matching_coeffs(s.config.epsilon), s.wkb_amplitude)});
                break;
            }
            case Command::compare: {
                if (s.methods.size() != 2) throw DomainError("compare needs exactly two methods");
                const CompareReport r = compare(s.config, s.methods[0], s.methods[1], s.grid, s.opts);
                detail::emit(s.output_path, out, [&](std::ostream& os) { os << to_json(r, s.config).dump(1) << '\n'; });
                break;
            }
            case Command::figures: detail::run_figures(s); break;
            case Command::sweep: detail::run_sweep(s, out, err, status); break;
        }
        return status;
    } catch (const Error& e) {
        const int code = exit_code_for(e);
        write_error_record(err, e.kind(), e.what(), code);
        return code;
    } catch (const std::exception& e) {
        write_error_record(err, "internal_error", e.what(), 3);
        return 3;
    }
}

}  // namespace lz
