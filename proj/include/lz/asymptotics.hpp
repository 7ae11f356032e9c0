#pragma once
// Elementary-wave superpositions for large |tau|.
//
// All formulas take |tau| and tau0 as positive numbers. Ratios of waves at
// negative times use f(-|tau|)/f(-tau0) = f(|tau|)/f(tau0); the decay factor
// e^{-pi/(2 eps)} from continuing ln(-1) appears explicitly where it belongs.

#include <cmath>
#include <complex>

#include "lz/core.hpp"

namespace lz {

struct NegativeCoefficients {
    cplx alpha_minus;
    cplx beta_minus;
};

struct MatchingCoefficients {
    cplx gamma{1.0, 0.0};
    cplx delta;
    cplx rho;
    cplx sigma{-1.0, 0.0};
};

namespace detail {

inline void require_tau_abs(double tau_abs, const LZConfig& c) {
    require_asymptotic_config(c);
    // allow the end point tau0 to be hit through rounding of a grid
    if (!(tau_abs >= tau_min) || tau_abs > c.tau0 * (1.0 + 1e-12))
        throw DomainError("|tau| must lie in [tau_min, tau0], got " + std::to_string(tau_abs));
}

// e^{-pi/(2 eps)}
inline double lz_factor(double epsilon) { return std::exp(-pi / (2.0 * epsilon)); }

}  // namespace detail

// alpha_- = c / f(tau0), beta_- = -c / (2 eps tau0 f*(tau0)), c = [1 + 1/(4 eps^2 tau0^2)]^{-1}.
inline NegativeCoefficients coeffs_negative(const LZConfig& c) {
    require_asymptotic_config(c);
    const double x0 = 1.0 / (2.0 * c.epsilon * c.tau0);
    const double pref = 1.0 / (1.0 + x0 * x0);
    const cplx f0 = elementary_wave_f(c.tau0, c.epsilon);
    return {pref / f0, -pref * x0 / std::conj(f0)};
}

// The general superposition at negative time with explicit coefficients:
// a = alpha f - beta f* / (2 eps |tau|), b = beta f* + alpha f / (2 eps |tau|).
inline Amplitudes superpose_negative(double tau_abs, double epsilon, const NegativeCoefficients& k) {
    const cplx f = elementary_wave_f(tau_abs, epsilon);
    const double x = 1.0 / (2.0 * epsilon * tau_abs);
    return {k.alpha_minus * f - x * k.beta_minus * std::conj(f), k.beta_minus * std::conj(f) + x * k.alpha_minus * f};
}

// a(-|tau|), b(-|tau|) with terms of order 1/(tau0^2 |tau|) dropped.
inline Amplitudes amplitudes_negative(double tau_abs, const LZConfig& c) {
    detail::require_tau_abs(tau_abs, c);
    const double x0 = 1.0 / (2.0 * c.epsilon * c.tau0);
    const double x = 1.0 / (2.0 * c.epsilon * tau_abs);
    const cplx F = tau_abs == c.tau0 ? cplx{1.0, 0.0} : std::polar(1.0, delta_phi(tau_abs, c));
    const cplx K = std::conj(F);
    return {(1.0 - x0 * x0) * F + x0 * x * K, x * F - x0 * K};
}

// exp(i delta_phi): the negative-time amplitude with 1/tau0 corrections dropped.
inline cplx amplitude_a_negative_leading(double tau_abs, const LZConfig& c) {
    detail::require_tau_abs(tau_abs, c);
    if (tau_abs == c.tau0) return {1.0, 0.0};
    return std::polar(1.0, delta_phi(tau_abs, c));
}

// Which value of ln(-1) continues the logarithmic phase through tau = 0.
enum class LogBranch {
    upper,  // ln(-1) = +i pi, decaying amplitude
    lower,  // ln(-1) = -i pi, amplitude grows past unity
};

// e^{i ln(-1) / (2 eps)} applied to exp(i delta_phi).
inline cplx heuristic_positive_a(double tau_abs, const LZConfig& c, LogBranch branch = LogBranch::upper) {
    const cplx leading = amplitude_a_negative_leading(tau_abs, c);
    const cplx ln_minus_one{0.0, branch == LogBranch::upper ? pi : -pi};
    return std::exp(cplx{0.0, 1.0} * ln_minus_one / (2.0 * c.epsilon)) * leading;
}

enum class PositiveForm {
    leading,      // two terms, order 1/tau0 dropped
    finite_tau0,  // four terms including the 1/tau0 corrections
};

// a(|tau|), b(|tau|) for large positive times from the matching constants.
inline Amplitudes amplitudes_positive(double tau_abs, const LZConfig& c, const MatchingCoefficients& k,
                                      PositiveForm form = PositiveForm::leading) {
    detail::require_tau_abs(tau_abs, c);
    for (const cplx v : {k.gamma, k.delta, k.rho, k.sigma})
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw DomainError("amplitudes_positive: non-finite matching coefficient");

    const double L = detail::lz_factor(c.epsilon);
    const double x = 1.0 / (2.0 * c.epsilon * tau_abs);
    const cplx f = elementary_wave_f(tau_abs, c.epsilon);
    const cplx f0 = elementary_wave_f(c.tau0, c.epsilon);
    const cplx F = f / f0;             // f-wave continued through the upper branch
    const cplx G = std::conj(f) / f0;  // f*-wave

    if (form == PositiveForm::leading) {
        const cplx cf = k.gamma * L, cg = k.delta / L;
        return {cf * F + cg * x * G, cg * G - cf * x * F};
    }
    const double x0 = 1.0 / (2.0 * c.epsilon * c.tau0);
    const cplx H = f * f0;
    const cplx K = std::conj(F);
    const cplx A1 = k.gamma * (1.0 - x0 * x0) * L;
    const cplx A2 = k.delta / L;
    const cplx A3 = -x0 * k.rho * L;
    // the f*-wave carries +sigma x0 in both components; the opposite sign leaves an O(1/tau0) error in b
    const cplx A4 = k.sigma * x0 * L;
    return {A1 * F + A2 * x * G + A3 * H + A4 * x * K, -A1 * x * F + A2 * G - A3 * x * H + A4 * K};
}

struct AsymptoticLimits {
    cplx a_limit;
    cplx b_limit;
    double phi_b = 0.0;  // arg delta - 2 phi(tau0), reduced to (-pi, pi]
};

inline AsymptoticLimits asymptotic_limits(const LZConfig& c, const MatchingCoefficients& k) {
    require_asymptotic_config(c);
    const double L = detail::lz_factor(c.epsilon);
    AsymptoticLimits out;
    out.a_limit = k.gamma * L;
    out.phi_b = std::remainder(std::arg(k.delta) - 2.0 * phase_phi(c.tau0, c.epsilon), 2.0 * pi);
    out.b_limit = std::polar(std::abs(k.delta) / L, out.phi_b);
    return out;
}

// Level about which |a| oscillates at large positive times: modulus of the
// coefficient multiplying f(|tau|) in the four-term form.
inline double oscillation_center(const LZConfig& c, const MatchingCoefficients& k) {
    require_asymptotic_config(c);
    const double L = detail::lz_factor(c.epsilon);
    const double x0 = 1.0 / (2.0 * c.epsilon * c.tau0);
    const cplx f0 = elementary_wave_f(c.tau0, c.epsilon);
    return std::abs(k.gamma * (1.0 - x0 * x0) * L / f0 - x0 * k.rho * L * f0);
}

// Amplitude of the Stueckelberg oscillation of |a|: |delta| e^{pi/(2 eps)} / (2 eps tau).
inline double stueckelberg_envelope(double tau_abs, double epsilon, const MatchingCoefficients& k) {
    if (!(tau_abs > 0.0) || !(epsilon > 0.0)) throw DomainError("stueckelberg_envelope: tau and eps must be > 0");
    return std::abs(k.delta) / detail::lz_factor(epsilon) / (2.0 * epsilon * tau_abs);
}

// Defect of the superposition a = alpha f + beta f*/(2 eps tau), b = beta f* - alpha f/(2 eps tau)
// in the equations of motion, with the derivatives of f and f* taken from
//   i f' = -eps tau f - f/(2 eps tau),   i f*' = eps tau f* + f*/(2 eps tau).
// For tau < 0 the waves carry ln|tau|. Returns the Euclidean norm of both defects.
inline double residual_check(double tau, const LZConfig& c, cplx alpha, cplx beta) {
    require_asymptotic_config(c);
    if (!(std::abs(tau) >= tau_min)) throw DomainError("residual_check requires |tau| >= tau_min");
    constexpr cplx I{0.0, 1.0};
    const double eps = c.epsilon;
    const cplx f = elementary_wave_f(std::abs(tau), eps);
    const cplx fs = std::conj(f);
    const double x = 1.0 / (2.0 * eps * tau);
    const double xdot = -1.0 / (2.0 * eps * tau * tau);

    const cplx i_fdot = -eps * tau * f - x * f;
    const cplx i_fsdot = eps * tau * fs + x * fs;

    const cplx a = alpha * f + beta * x * fs;
    const cplx b = beta * fs - alpha * x * f;
    const cplx i_adot = alpha * i_fdot + beta * (I * xdot * fs + x * i_fsdot);
    const cplx i_bdot = beta * i_fsdot - alpha * (I * xdot * f + x * i_fdot);

    const cplx d1 = i_adot - (-eps * tau * a + b);
    const cplx d2 = i_bdot - (eps * tau * b + a);
    return std::sqrt(std::norm(d1) + std::norm(d2));
}

}  // namespace lz
