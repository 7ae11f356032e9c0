#pragma once
// Problem definition of the linear two-level crossing in scaled units:
//
//   i da/dtau = -eps tau a + b
//   i db/dtau =  eps tau b + a,      a(-tau0) = 1, b(-tau0) = 0.
//
// Everything here is a pure function of its arguments.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lz/errors.hpp"

namespace lz {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;

// Smallest |tau| accepted by the asymptotic formulas (1/tau and ln tau diverge).
inline constexpr double tau_min = 1e-6;

struct LZConfig {
    double epsilon = 3.0;  // dimensionless chirp
    double tau0 = 100.0;   // dynamics start at tau = -tau0
};

// Throws DomainError unless eps > 0 and tau0 >= tau_min.
inline void require_asymptotic_config(const LZConfig& c) {
    if (!(c.epsilon > 0.0) || !std::isfinite(c.epsilon))
        throw DomainError("epsilon must be positive and finite, got " + std::to_string(c.epsilon));
    if (!(c.tau0 >= tau_min) || !std::isfinite(c.tau0))
        throw DomainError("tau0 must be >= tau_min and finite, got " + std::to_string(c.tau0));
}

struct Amplitudes {
    cplx a{1.0, 0.0};
    cplx b{0.0, 0.0};

    double norm() const { return std::norm(a) + std::norm(b); }
};

// ||a|^2 + |b|^2 - 1|
inline double norm_error(const Amplitudes& amps) { return std::abs(amps.norm() - 1.0); }

struct TrajectoryPoint {
    double tau = 0.0;
    Amplitudes amps;
    double norm_error = 0.0;
    double phase_a = 0.0;  // unwrapped arg a
    double phase_b = 0.0;  // unwrapped arg b
};

enum class Method { numeric, asymptotic_negative, asymptotic_positive, heuristic, exact_pcf, wkb };

inline std::string_view to_string(Method m) {
    switch (m) {
        case Method::numeric: return "numeric";
        case Method::asymptotic_negative: return "asymptotic_negative";
        case Method::asymptotic_positive: return "asymptotic_positive";
        case Method::heuristic: return "heuristic";
        case Method::exact_pcf: return "exact_pcf";
        case Method::wkb: return "wkb";
    }
    return "unknown";
}

struct SolverMeta {
    double rtol = 0.0;
    double atol = 0.0;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
    std::size_t rhs_evaluations = 0;
    // Sum over accepted steps of the embedded local error estimate (max norm).
    double accumulated_error = 0.0;
};

struct Trajectory {
    LZConfig config;
    std::vector<TrajectoryPoint> points;
    Method method = Method::numeric;
    SolverMeta solver_meta;
};

// Continuous phase tracking: adds +-2pi whenever consecutive principal
// arguments jump by more than pi.
class PhaseUnwrapper {
public:
    double operator()(double principal) {
        if (!started_) {
            started_ = true;
            last_principal_ = principal;
            unwrapped_ = principal;
            return unwrapped_;
        }
        double step = principal - last_principal_;
        if (step > pi)
            step -= 2.0 * pi * std::ceil((step - pi) / (2.0 * pi));
        else if (step < -pi)
            step += 2.0 * pi * std::ceil((-step - pi) / (2.0 * pi));
        unwrapped_ += step;
        last_principal_ = principal;
        return unwrapped_;
    }

private:
    bool started_ = false;
    double last_principal_ = 0.0;
    double unwrapped_ = 0.0;
};

// Builds trajectory points from sampled amplitudes, unwrapping phases across samples.
inline std::vector<TrajectoryPoint> make_points(std::span<const double> taus,
                                                std::span<const Amplitudes> amps) {
    if (taus.size() != amps.size()) throw DomainError("make_points: size mismatch");
    std::vector<TrajectoryPoint> out;
    out.reserve(taus.size());
    PhaseUnwrapper ua, ub;
    for (std::size_t i = 0; i < taus.size(); ++i) {
        TrajectoryPoint p;
        p.tau = taus[i];
        p.amps = amps[i];
        p.norm_error = norm_error(amps[i]);
        p.phase_a = ua(std::arg(amps[i].a));
        p.phase_b = ub(std::arg(amps[i].b));
        out.push_back(p);
    }
    return out;
}

// phi(tau) = eps tau^2 / 2 + ln(tau) / (2 eps), tau > 0.
inline double phase_phi(double tau, double epsilon) {
    if (!(tau > 0.0)) throw DomainError("phase_phi requires tau > 0");
    if (!(epsilon > 0.0)) throw DomainError("phase_phi requires epsilon > 0");
    return 0.5 * epsilon * tau * tau + std::log(tau) / (2.0 * epsilon);
}

// Elementary wave f(tau) = exp(i phi(tau)).
inline cplx elementary_wave_f(double tau, double epsilon) {
    return std::polar(1.0, phase_phi(tau, epsilon));
}

// Phase of a(-|tau|) relative to the start:
// delta_phi = eps (tau^2 - tau0^2) / 2 + ln(|tau| / tau0) / (2 eps).
inline double delta_phi(double tau_abs, const LZConfig& c) {
    require_asymptotic_config(c);
    if (!(tau_abs > 0.0) || tau_abs > c.tau0)
        throw DomainError("delta_phi requires 0 < |tau| <= tau0");
    if (tau_abs == c.tau0) return 0.0;
    // (tau - tau0)(tau + tau0) keeps the quadratic term accurate near tau0
    return 0.5 * c.epsilon * (tau_abs - c.tau0) * (tau_abs + c.tau0) +
           std::log(tau_abs / c.tau0) / (2.0 * c.epsilon);
}

// Time derivative of delta_phi(-|tau|) with respect to tau (tau < 0).
inline double delta_phi_rate(double tau_abs, const LZConfig& c) {
    require_asymptotic_config(c);
    if (!(tau_abs > 0.0)) throw DomainError("delta_phi_rate requires |tau| > 0");
    return -c.epsilon * tau_abs - 1.0 / (2.0 * c.epsilon * tau_abs);
}

struct LZValues {
    double a = 1.0;
    double b = 0.0;
};

// a_LZ = exp(-pi / (2 eps)),  b_LZ = sqrt(1 - a_LZ^2).
inline LZValues lz_values(double epsilon) {
    if (!(epsilon > 0.0)) throw DomainError("lz_values requires epsilon > 0");
    LZValues v;
    v.a = std::exp(-pi / (2.0 * epsilon));
    v.b = std::sqrt(-std::expm1(-pi / epsilon));
    return v;
}

}  // namespace lz
