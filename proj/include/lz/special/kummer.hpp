#pragma once
// Kummer's confluent hypergeometric M(a, b, x) by direct Taylor summation in
// extended (113-bit) precision. On the diagonal rays used by the crossing
// problem x is purely imaginary and the terms grow to ~e^{|x|} before they
// cancel, so double-precision accumulation is not enough.

#include <cmath>
#include <complex>
#include <limits>

#include "lz/errors.hpp"

#if defined(__SIZEOF_FLOAT128__)
namespace lz::detail {
using quad = __float128;
inline constexpr double quad_epsilon = 1.925929944387235853e-34;  // 2^-112
}  // namespace lz::detail
#else
#include <boost/multiprecision/cpp_bin_float.hpp>
namespace lz::detail {
using quad = boost::multiprecision::cpp_bin_float_quad;
inline constexpr double quad_epsilon = 1.925929944387235853e-34;
}  // namespace lz::detail
#endif

namespace lz {

namespace detail {

// std::complex is only specified for the standard floating types.
struct QComplex {
    quad re = 0, im = 0;

    QComplex() = default;
    QComplex(quad r, quad i) : re(r), im(i) {}
    explicit QComplex(std::complex<double> z) : re(z.real()), im(z.imag()) {}

    friend QComplex operator+(const QComplex& x, const QComplex& y) { return {x.re + y.re, x.im + y.im}; }
    friend QComplex operator-(const QComplex& x, const QComplex& y) { return {x.re - y.re, x.im - y.im}; }
    friend QComplex operator*(const QComplex& x, const QComplex& y) {
        return {x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re};
    }
    friend QComplex operator/(const QComplex& x, quad d) { return {x.re / d, x.im / d}; }

    std::complex<double> to_double() const { return {static_cast<double>(re), static_cast<double>(im)}; }
    double abs_approx() const { return std::abs(to_double()); }
};

}  // namespace detail

struct KummerResult {
    std::complex<double> value;
    double max_term = 0.0;    // largest |term| met during summation
    std::size_t terms = 0;
};

// M(a, b, x) = sum_n (a)_n / (b)_n x^n / n!.
// Stops once |term| / |sum| < 1e-17 for three consecutive terms. Throws AccuracyLoss
// when max|term| * working epsilon / |sum| exceeds 1e-8.
inline KummerResult kummer_m(std::complex<double> a, double b, std::complex<double> x,
                             std::size_t max_terms = 100000) {
    using detail::QComplex;
    using detail::quad;
    if (b <= 0.0 && b == std::floor(b)) throw DomainError("kummer_m: b must not be a nonpositive integer");

    const QComplex qa(a), qx(x);
    QComplex term(quad(1), quad(0));
    QComplex sum = term;
    KummerResult out;
    out.max_term = 1.0;
    int small_run = 0;
    std::size_t n = 0;
    for (; n < max_terms; ++n) {
        const quad nn = static_cast<quad>(static_cast<double>(n));
        const QComplex an(qa.re + nn, qa.im);
        term = (term * an) * qx / ((quad(b) + nn) * (nn + quad(1)));
        sum = sum + term;
        const double t = term.abs_approx();
        const double s = sum.abs_approx();
        out.max_term = std::max(out.max_term, t);
        if (t == 0.0 || t < 1e-17 * s) {
            if (++small_run >= 3) break;
        } else {
            small_run = 0;
        }
    }
    if (n == max_terms) throw AccuracyLoss("kummer_m: series did not converge");
    out.terms = n + 1;
    out.value = sum.to_double();
    const double s = std::abs(out.value);
    if (!(s > 0.0) || out.max_term * detail::quad_epsilon / s > 1e-8)
        throw AccuracyLoss("kummer_m: cancellation exceeds working precision");
    return out;
}

}  // namespace lz
