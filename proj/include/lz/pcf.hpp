#pragma once
// Parabolic cylinder functions D_nu(z) of complex order and the exact solution
//   a(tau) = Z(w) / Z(-z0),  Z(w) = D_{nu+1}(z0) D_nu(w) + D_{nu+1}(-z0) D_nu(-w),
// with nu = -1 - i/(2 eps), w = sqrt(2 eps) tau e^{i pi/4}, z0 = sqrt(2 eps) tau0 e^{i pi/4}.

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>

#include "lz/asymptotics.hpp"
#include "lz/core.hpp"
#include "lz/special/kummer.hpp"
#include "lz/special/log_gamma.hpp"

namespace lz {

enum class PcfRegime { power_series, asymptotic };

inline std::string_view to_string(PcfRegime r) {
    return r == PcfRegime::power_series ? "power_series" : "asymptotic";
}

struct PcfValue {
    cplx value;
    PcfRegime regime = PcfRegime::power_series;
    double err_estimate = 0.0;
};

// |z|^2 / 2 at or below which the Kummer representation is used.
inline constexpr double pcf_switch = 30.0;

// The two rays visited by the crossing problem.
enum class Ray {
    plus_quarter,        // arg z = pi/4 (positive times)
    minus_three_quarter  // arg z = -3 pi/4 (negative times)
};

// A point r e^{i theta} on one of the rays. The phase is carried symbolically so
// that z^2 = i r^2 holds exactly and powers use the intended branch.
struct RayPoint {
    double radius_sq = 0.0;
    Ray ray = Ray::plus_quarter;

    double radius() const { return std::sqrt(radius_sq); }
    double arg() const { return ray == Ray::plus_quarter ? pi / 4.0 : -3.0 * pi / 4.0; }
    cplx z() const { return std::polar(radius(), arg()); }
    RayPoint operator-() const {
        return {radius_sq, ray == Ray::plus_quarter ? Ray::minus_three_quarter : Ray::plus_quarter};
    }
};

// w = sqrt(2 eps) tau e^{i pi/4}: the +pi/4 ray for tau >= 0, the -3pi/4 ray for tau < 0.
inline RayPoint time_point(double tau, double epsilon) {
    return {2.0 * epsilon * tau * tau, tau >= 0.0 ? Ray::plus_quarter : Ray::minus_three_quarter};
}

namespace detail {

struct PcfArg {
    cplx z;
    cplx z2;
    double log_r;
    double theta;
};

inline PcfArg make_arg(const RayPoint& p) {
    return {p.z(), cplx{0.0, p.radius_sq}, 0.5 * std::log(p.radius_sq), p.arg()};
}

inline PcfArg make_arg(cplx z) { return {z, z * z, std::log(std::abs(z)), std::arg(z)}; }

// z^p on the branch fixed by theta.
inline cplx branch_pow_exp(cplx p, const PcfArg& x, cplx extra_exponent) {
    return std::exp(p * cplx{x.log_r, x.theta} + extra_exponent);
}

struct SeriesPair {
    PcfValue plus;   // D_nu(z)
    PcfValue minus;  // D_nu(-z)
};

// D_nu(+-z) = 2^{nu/2} e^{-z^2/4} [sqrt(pi)/Gamma((1-nu)/2) M(-nu/2, 1/2, z^2/2)
//                                 -+ sqrt(2 pi) z / Gamma(-nu/2) M((1-nu)/2, 3/2, z^2/2)]
inline SeriesPair pcf_series_pair(cplx nu, const PcfArg& x) {
    constexpr double sqrt_pi = 1.7724538509055160273;
    constexpr double sqrt_2pi = 2.5066282746310005024;
    constexpr double dbl_eps = 2.220446049250313e-16;
    const cplx half_z2 = 0.5 * x.z2;
    const KummerResult m1 = kummer_m(-0.5 * nu, 0.5, half_z2);
    const KummerResult m2 = kummer_m(0.5 * (1.0 - nu), 1.5, half_z2);
    const cplx c1 = sqrt_pi * rgamma(0.5 * (1.0 - nu));
    const cplx c2 = sqrt_2pi * rgamma(-0.5 * nu);
    const cplx pre = std::exp(0.5 * nu * std::log(2.0) - 0.25 * x.z2);
    const cplx t1 = c1 * m1.value;
    const cplx t2 = c2 * x.z * m2.value;

    const double scale = std::abs(pre);
    const double rounding = scale * (std::abs(t1) + std::abs(t2)) * 8.0 * dbl_eps;
    const double truncation =
        scale * (std::abs(c1) * m1.max_term + std::abs(c2) * std::abs(x.z) * m2.max_term) * quad_epsilon;
    const double err = rounding + truncation;

    SeriesPair out;
    out.plus = {pre * (t1 - t2), PcfRegime::power_series, err};
    out.minus = {pre * (t1 + t2), PcfRegime::power_series, err};
    for (const PcfValue* v : {&out.plus, &out.minus}) {
        const double mag = std::abs(v->value);
        if (mag == 0.0 ? err > 0.0 : err / mag > 1e-8)
            throw AccuracyLoss("pcf_D: cancellation between the Kummer terms exceeds 1e-8 relative");
    }
    return out;
}

struct TruncatedSum {
    cplx sum{1.0, 0.0};
    double dropped = 0.0;  // first omitted term (relative to the leading 1)
};

// sum_s t_s with t_0 = 1, t_{s+1} = t_s * ratio(s), stopped at the smallest term.
template <class Ratio>
TruncatedSum smallest_term_sum(Ratio ratio, std::size_t max_terms = 400) {
    TruncatedSum out;
    cplx t{1.0, 0.0};
    for (std::size_t s = 0; s < max_terms; ++s) {
        const cplx next = t * ratio(static_cast<double>(s));
        const double an = std::abs(next);
        if (an >= std::abs(t) || an < 1e-17 * std::abs(out.sum)) {
            out.dropped = an;
            return out;
        }
        out.sum += next;
        t = next;
    }
    out.dropped = std::abs(t);
    return out;
}

// e^{-z^2/4} z^nu sum_s (-1)^s (-nu)_{2s} / (s! (2 z^2)^s), plus beyond the Stokes lines
// |arg z| = pi/2 the recessive piece
//   arg z < 0:  kappa_nu e^{-i pi (nu+1)} e^{z^2/4} z^{-nu-1} sum_s (nu+1)_{2s} / (s! (2 z^2)^s)
//   arg z > 0: -kappa_nu e^{ i pi nu}     e^{z^2/4} z^{-nu-1} sum_s (nu+1)_{2s} / (s! (2 z^2)^s)
inline PcfValue pcf_asymptotic(cplx nu, const PcfArg& x) {
    constexpr cplx I{0.0, 1.0};
    const cplx two_z2 = 2.0 * x.z2;
    const TruncatedSum s1 =
        smallest_term_sum([&](double s) { return -(nu - 2.0 * s) * (nu - 2.0 * s - 1.0) / ((s + 1.0) * two_z2); });
    const cplx lead1 = branch_pow_exp(nu, x, -0.25 * x.z2);
    PcfValue out{lead1 * s1.sum, PcfRegime::asymptotic, std::abs(lead1) * s1.dropped};

    if (std::abs(x.theta) > pi / 2.0) {
        constexpr double sqrt_2pi = 2.5066282746310005024;
        const cplx kap = sqrt_2pi * rgamma(-nu);
        const cplx coef = x.theta < 0.0 ? kap * std::exp(-I * pi * (nu + 1.0)) : -kap * std::exp(I * pi * nu);
        const TruncatedSum s2 = smallest_term_sum(
            [&](double s) { return (nu + 1.0 + 2.0 * s) * (nu + 2.0 + 2.0 * s) / ((s + 1.0) * two_z2); });
        const cplx lead2 = coef * branch_pow_exp(-nu - 1.0, x, 0.25 * x.z2);
        out.value += lead2 * s2.sum;
        out.err_estimate += std::abs(lead2) * s2.dropped;
    }
    return out;
}

inline PcfValue pcf_dispatch(cplx nu, const PcfArg& x) {
    if (0.5 * std::abs(x.z2) <= pcf_switch) return pcf_series_pair(nu, x).plus;
    return pcf_asymptotic(nu, x);
}

}  // namespace detail

// kappa_nu = sqrt(2 pi) / Gamma(-nu).
inline cplx kappa(cplx nu) {
    if (detail::is_gamma_pole(-nu)) throw PoleError("kappa: Gamma(-nu) has a pole");
    constexpr double sqrt_2pi = 2.5066282746310005024;
    return sqrt_2pi * std::exp(-log_gamma(-nu));
}

// D_nu(z) for a general complex argument (branch of z^nu from the principal arg z).
inline PcfValue pcf_D(cplx nu, cplx z) { return detail::pcf_dispatch(nu, detail::make_arg(z)); }

// D_nu(z) with z on one of the two rays.
inline PcfValue pcf_D(cplx nu, const RayPoint& z) { return detail::pcf_dispatch(nu, detail::make_arg(z)); }

// Power-series evaluation regardless of |z| (throws AccuracyLoss when it cannot be trusted).
inline PcfValue pcf_D_series(cplx nu, const RayPoint& z) {
    return detail::pcf_series_pair(nu, detail::make_arg(z)).plus;
}
inline PcfValue pcf_D_series(cplx nu, cplx z) { return detail::pcf_series_pair(nu, detail::make_arg(z)).plus; }

// Asymptotic evaluation regardless of |z|.
inline PcfValue pcf_D_asymptotic(cplx nu, const RayPoint& z) {
    return detail::pcf_asymptotic(nu, detail::make_arg(z));
}
inline PcfValue pcf_D_asymptotic(cplx nu, cplx z) { return detail::pcf_asymptotic(nu, detail::make_arg(z)); }

// (D_nu(z), D_nu(-z)); the series regime shares the Kummer sums.
inline std::pair<PcfValue, PcfValue> pcf_D_pair(cplx nu, const RayPoint& z) {
    if (0.5 * z.radius_sq <= pcf_switch) {
        auto p = detail::pcf_series_pair(nu, detail::make_arg(z));
        return {p.plus, p.minus};
    }
    return {detail::pcf_asymptotic(nu, detail::make_arg(z)), detail::pcf_asymptotic(nu, detail::make_arg(-z))};
}

// nu = -1 - i/(2 eps).
inline cplx pcf_order(double epsilon) {
    if (!(epsilon > 0.0)) throw DomainError("pcf_order requires epsilon > 0");
    return {-1.0, -1.0 / (2.0 * epsilon)};
}

// chi = sqrt(1 - e^{-pi/eps}) e^{i pi/4} e^{-i ln(2 eps)/(2 eps)} e^{i arg Gamma(i/(2 eps))}.
inline cplx chi(double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw DomainError("chi requires 0 < epsilon < inf");
    const double modulus = std::sqrt(-std::expm1(-pi / epsilon));
    const double arg_gamma = log_gamma(cplx{0.0, 1.0 / (2.0 * epsilon)}).imag();
    return std::polar(modulus, pi / 4.0 - std::log(2.0 * epsilon) / (2.0 * epsilon) + arg_gamma);
}

// gamma = 1, delta = e^{-pi/(2 eps)} chi, rho = -e^{pi/(2 eps)} chi*, sigma = -1.
inline MatchingCoefficients matching_coeffs(double epsilon) {
    const cplx x = chi(epsilon);
    const double L = detail::lz_factor(epsilon);
    MatchingCoefficients k;
    k.gamma = {1.0, 0.0};
    k.delta = L * x;
    k.rho = -std::conj(x) / L;
    k.sigma = {-1.0, 0.0};
    return k;
}

// pi/4 - eps tau0^2 - ln(sqrt(2 eps) tau0)/eps + arg Gamma(i/(2 eps)), reduced to (-pi, pi].
inline double phase_b_closed_form(const LZConfig& c) {
    require_asymptotic_config(c);
    const double eps = c.epsilon;
    const double arg_gamma = log_gamma(cplx{0.0, 1.0 / (2.0 * eps)}).imag();
    // eps tau0^2 is reduced on its own first to keep the large quadratic phase exact
    const double quad = std::remainder(eps * c.tau0 * c.tau0, 2.0 * pi);
    return std::remainder(pi / 4.0 - quad - std::log(std::sqrt(2.0 * eps) * c.tau0) / eps + arg_gamma, 2.0 * pi);
}

struct GammaModulus {
    double sinh_form = 0.0;         // sqrt(pi / (q sinh(pi q))), q = 1/(2 eps)
    double exponential_form = 0.0;  // 2 sqrt(pi eps) e^{-pi/(4 eps)} / sqrt(1 - e^{-pi/eps})
};

// The two closed forms of |Gamma(i/(2 eps))|.
inline GammaModulus gamma_abs_identity(double epsilon) {
    if (!(epsilon > 0.0)) throw DomainError("gamma_abs_identity requires epsilon > 0");
    const double q = 1.0 / (2.0 * epsilon);
    GammaModulus g;
    g.sinh_form = std::sqrt(pi / (q * std::sinh(pi * q)));
    g.exponential_form =
        2.0 * std::sqrt(pi * epsilon) * std::exp(-pi / (4.0 * epsilon)) / std::sqrt(-std::expm1(-pi / epsilon));
    return g;
}

// Leading asymptotic pieces of Z(-z) for z, z0 on the +pi/4 ray:
// A = lead_{nu+1}(z0) lead_nu(-z), B = lead_{nu+1}(z0) rec_nu(-z),
// C = lead_{nu+1}(-z0) lead_nu(z), D = rec_{nu+1}(-z0) lead_nu(z),
// where lead_mu(x) = e^{-x^2/4} x^mu and rec_mu(x) = kappa_mu e^{-i pi (mu+1)} e^{x^2/4} x^{-mu-1}.
struct NegativeTimePieces {
    cplx A, B, C, D;
};

inline NegativeTimePieces negative_time_pieces(cplx nu, double z_radius_sq, double z0_radius_sq) {
    constexpr cplx I{0.0, 1.0};
    const auto lead = [](cplx mu, const RayPoint& p) {
        return detail::branch_pow_exp(mu, detail::make_arg(p), -0.25 * cplx{0.0, p.radius_sq});
    };
    const auto rec = [&](cplx mu, const RayPoint& p) {
        return kappa(mu) * std::exp(-I * pi * (mu + 1.0)) *
               detail::branch_pow_exp(-mu - 1.0, detail::make_arg(p), 0.25 * cplx{0.0, p.radius_sq});
    };
    const RayPoint z{z_radius_sq, Ray::plus_quarter}, z0{z0_radius_sq, Ray::plus_quarter};
    return {lead(nu + 1.0, z0) * lead(nu, -z), lead(nu + 1.0, z0) * rec(nu, -z), lead(nu + 1.0, -z0) * lead(nu, z),
            rec(nu + 1.0, -z0) * lead(nu, z)};
}

// kappa_nu [1 - (nu+1)/z0^2] with z0^2 = i |z0|^2.
inline cplx z0_closed_form(cplx nu, double z0_radius_sq) {
    return kappa(nu) * (1.0 - (nu + 1.0) / cplx{0.0, z0_radius_sq});
}

// Exact amplitudes for one configuration. Construction evaluates the tau-independent
// factors D_{nu+1}(+-z0) and Z0 once.
class ExactSolution {
public:
    explicit ExactSolution(const LZConfig& c) : config_(c) {
        require_asymptotic_config(c);
        nu_ = pcf_order(c.epsilon);
        z0_ = time_point(c.tau0, c.epsilon);
        const auto [d1p, d1m] = pcf_D_pair(nu_ + 1.0, z0_);
        const auto [dp, dm] = pcf_D_pair(nu_, z0_);
        c_plus_ = d1p.value;
        c_minus_ = d1m.value;
        z0_value_ = c_plus_ * dm.value + c_minus_ * dp.value;
    }

    const LZConfig& config() const { return config_; }
    cplx order() const { return nu_; }
    cplx z0_value() const { return z0_value_; }
    cplx d_nu1_z0() const { return c_plus_; }
    cplx d_nu1_minus_z0() const { return c_minus_; }

    cplx a(double tau) const { return amplitudes(tau).a; }
    cplx b(double tau) const { return amplitudes(tau).b; }

    Amplitudes amplitudes(double tau) const {
        check(tau);
        const RayPoint w = time_point(tau, config_.epsilon);
        const auto [dp, dm] = pcf_D_pair(nu_, w);          // D_nu(w), D_nu(-w)
        const auto [ep, em] = pcf_D_pair(nu_ + 1.0, w);    // D_{nu+1}(w), D_{nu+1}(-w)
        const cplx scale = std::sqrt(2.0 * config_.epsilon) * std::polar(1.0, pi / 4.0);
        Amplitudes out;
        out.a = (c_plus_ * dp.value + c_minus_ * dm.value) / z0_value_;
        // b = i da/dtau + eps tau a. With D'_nu(x) = (x/2) D_nu(x) - D_{nu+1}(x) the eps tau a
        // part cancels analytically, which avoids losing digits to it at large eps tau and makes
        // b(-tau0) vanish identically.
        out.b = cplx{0.0, 1.0} * scale * (c_minus_ * em.value - c_plus_ * ep.value) / z0_value_;
        return out;
    }

    // (A u, B v) at tau: the two products whose sum is a(tau), with
    // A = D_{nu+1}(z0)/Z0, u = D_nu(w), B = D_{nu+1}(-z0)/Z0, v = D_nu(-w).
    std::pair<cplx, cplx> decompose(double tau) const {
        check(tau);
        const auto [dp, dm] = pcf_D_pair(nu_, time_point(tau, config_.epsilon));
        return {c_plus_ / z0_value_ * dp.value, c_minus_ / z0_value_ * dm.value};
    }

private:
    void check(double tau) const {
        if (!std::isfinite(tau) || std::abs(tau) > config_.tau0 * (1.0 + 1e-12))
            throw DomainError("exact solution requires |tau| <= tau0");
    }

    LZConfig config_;
    cplx nu_;
    RayPoint z0_;
    cplx c_plus_, c_minus_, z0_value_;
};

inline cplx exact_a(double tau, const LZConfig& c) { return ExactSolution(c).a(tau); }
inline cplx exact_b(double tau, const LZConfig& c) { return ExactSolution(c).b(tau); }

}  // namespace lz
