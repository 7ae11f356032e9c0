#pragma once
// Complex log-gamma: upward recurrence into Re z >= 15, then Stirling.

#include <array>
#include <cmath>
#include <complex>

#include "lz/errors.hpp"

namespace lz {

namespace detail {

inline bool is_gamma_pole(std::complex<double> z) {
    return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

}  // namespace detail

// Principal branch of ln Gamma(z), continuous off the negative real axis.
inline std::complex<double> log_gamma(std::complex<double> z) {
    using C = std::complex<double>;
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw DomainError("log_gamma: non-finite argument");
    if (detail::is_gamma_pole(z)) throw PoleError("log_gamma: pole at nonpositive integer");

    // ln Gamma(z) = ln Gamma(z + n) - sum_k ln(z + k); principal logs keep the branch
    C shift{0.0, 0.0};
    C w = z;
    while (w.real() < 15.0) {
        shift += std::log(w);
        w += 1.0;
    }

    // B_{2k} / (2k (2k-1))
    static constexpr std::array<double, 8> coef = {
        1.0 / 12.0,       -1.0 / 360.0,    1.0 / 1260.0,        -1.0 / 1680.0,
        1.0 / 1188.0,     -691.0 / 360360.0, 1.0 / 156.0,       -3617.0 / 122400.0,
    };
    const C winv = 1.0 / w;
    const C winv2 = winv * winv;
    C series{0.0, 0.0};
    for (auto it = coef.rbegin(); it != coef.rend(); ++it) series = series * winv2 + *it;
    series *= winv;

    constexpr double half_log_2pi = 0.91893853320467274178;
    return (w - 0.5) * std::log(w) - w + half_log_2pi + series - shift;
}

// 1/Gamma(z); zero at the poles of Gamma.
inline std::complex<double> rgamma(std::complex<double> z) {
    if (detail::is_gamma_pole(z)) return {0.0, 0.0};
    return std::exp(-log_gamma(z));
}

}  // namespace lz
