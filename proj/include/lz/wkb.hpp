#pragma once
// WKB waves of  a'' + [(eps tau)^2 + 1 - i eps] a = 0  for large positive tau:
//   u+- = N+- / sqrt(lambda) exp(+-i theta),  lambda = sqrt((eps tau)^2 + 1 - i eps),
//   theta = int lambda dtau,  N+ = sqrt(eps),  N- = 1/(2 sqrt(eps)).

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lz/core.hpp"

namespace lz {

enum class WkbSign { plus, minus };

struct WkbWave {
    WkbSign sign = WkbSign::plus;
    cplx normalization;
};

inline WkbWave make_wkb_wave(WkbSign sign, double epsilon) {
    if (!(epsilon > 0.0)) throw DomainError("WKB waves require epsilon > 0");
    return {sign, sign == WkbSign::plus ? cplx{std::sqrt(epsilon), 0.0} : cplx{0.5 / std::sqrt(epsilon), 0.0}};
}

inline cplx lambda_momentum(double tau, double epsilon) {
    const double et = epsilon * tau;
    return std::sqrt(cplx{et * et + 1.0, -epsilon});
}

enum class ThetaMode {
    closed_form_asymptotic,  // eps tau^2/2 + ln(tau)/(2 eps) - (i/2) ln(tau)
    quadrature,              // closed form at tau = 1 plus the integral of lambda from 1
};

inline constexpr double wkb_tau_ref = 1.0;

inline cplx theta_action(double tau, double epsilon, ThetaMode mode = ThetaMode::closed_form_asymptotic) {
    if (!(tau > 0.0)) throw DomainError("theta_action requires tau > 0");
    if (!(epsilon > 0.0)) throw DomainError("theta_action requires epsilon > 0");
    const auto closed = [epsilon](double t) {
        const double lt = std::log(t);
        return cplx{0.5 * epsilon * t * t + lt / (2.0 * epsilon), -0.5 * lt};
    };
    if (mode == ThetaMode::closed_form_asymptotic) return closed(tau);

    using boost::math::quadrature::gauss_kronrod;
    const auto re = [epsilon](double t) { return lambda_momentum(t, epsilon).real(); };
    const auto im = [epsilon](double t) { return lambda_momentum(t, epsilon).imag(); };
    constexpr unsigned max_depth = 20;
    constexpr double tol = 1e-13;
    const double ir = gauss_kronrod<double, 61>::integrate(re, wkb_tau_ref, tau, max_depth, tol);
    const double ii = gauss_kronrod<double, 61>::integrate(im, wkb_tau_ref, tau, max_depth, tol);
    return closed(wkb_tau_ref) + cplx{ir, ii};
}

enum class WkbAmplitude {
    full,          // 1/sqrt(lambda)
    lowest_order,  // 1/sqrt(eps tau)
};

inline cplx wkb_wave(WkbSign sign, double tau, double epsilon, WkbAmplitude amplitude = WkbAmplitude::full,
                     ThetaMode mode = ThetaMode::closed_form_asymptotic) {
    if (!(tau > 0.0)) throw DomainError("wkb_wave requires tau > 0");
    const WkbWave w = make_wkb_wave(sign, epsilon);
    const cplx root = amplitude == WkbAmplitude::full ? std::sqrt(lambda_momentum(tau, epsilon))
                                                      : cplx{std::sqrt(epsilon * tau), 0.0};
    const cplx th = theta_action(tau, epsilon, mode);
    const cplx phase = std::exp(cplx{0.0, sign == WkbSign::plus ? 1.0 : -1.0} * th);
    return w.normalization / root * phase;
}

// |a'' + ((eps tau)^2 + 1 - i eps) a| / (|a| ((eps tau)^2 + 1)) with a Richardson-extrapolated
// central second difference. h <= 0 selects 1e-4 max(1, |tau|).
inline double second_order_residual(const std::function<cplx(double)>& candidate, double tau, double epsilon,
                                    double h = 0.0) {
    if (!(epsilon > 0.0)) throw DomainError("second_order_residual requires epsilon > 0");
    const double scale = std::max(1.0, std::abs(tau));
    if (h <= 0.0) h = 1e-4 * scale;
    // below this the rounding of the second difference swamps the defect
    if (h < 1e-7 * scale) throw DomainError("second_order_residual: step h underflows the attainable accuracy");

    const cplx a0 = candidate(tau);
    const auto d2 = [&](double s) { return (candidate(tau + s) - 2.0 * a0 + candidate(tau - s)) / (s * s); };
    const cplx add = (4.0 * d2(0.5 * h) - d2(h)) / 3.0;
    const double et = epsilon * tau;
    const cplx defect = add + cplx{et * et + 1.0, -epsilon} * a0;
    const double norm = std::abs(a0) * (et * et + 1.0);
    if (!(norm > 0.0)) throw DomainError("second_order_residual: candidate vanishes at tau");
    return std::abs(defect) / norm;
}

}  // namespace lz
