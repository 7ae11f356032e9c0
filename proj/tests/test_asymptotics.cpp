#include <catch_amalgamated.hpp>

#include <cmath>

#include "lz/asymptotics.hpp"
#include "lz/integrator.hpp"
#include "lz/pcf.hpp"
#include "lz/reports.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using lz::cplx;

namespace {

double max_component(cplx d) { return std::max(std::abs(d.real()), std::abs(d.imag())); }

const lz::LZConfig reference_config{3.0, 100.0};

lz::Amplitudes numeric_at(const lz::LZConfig& c, double tau) {
    lz::SolverOptions o;
    o.sample_grid = {tau};
    return lz::integrate(c, o).points.front().amps;
}

}  // namespace

TEST_CASE("negative-time coefficients", "[asymptotics]") {
    const auto k = lz::coeffs_negative(reference_config);
    CHECK_THAT(std::abs(k.alpha_minus), WithinAbs(0.99999722, 5e-9));
    CHECK_THAT(std::abs(k.beta_minus), WithinRel(1.66666e-3, 1e-5));
    const auto far = lz::coeffs_negative({3.0, 1e8});
    CHECK_THAT(std::abs(far.alpha_minus), WithinAbs(1.0, 1e-15));
    CHECK(std::abs(far.beta_minus) < 1e-8);
}

TEST_CASE("negative-time coefficient moduli", "[asymptotics][property]") {
    const double eps = GENERATE(take(10, random(0.1, 10.0)));
    const double tau0 = GENERATE(take(5, random(1.0, 1000.0)));
    const auto k = lz::coeffs_negative({eps, tau0});
    const double x0 = 1.0 / (2 * eps * tau0);
    CHECK_THAT(std::abs(k.alpha_minus), WithinRel(1.0 / (1.0 + x0 * x0), 1e-14));
    CHECK(std::abs(k.alpha_minus) <= 1.0);
    CHECK_THAT(std::abs(k.beta_minus), WithinRel(std::abs(k.alpha_minus) * x0, 1e-14));
}

TEST_CASE("negative-time superposition meets the initial condition", "[asymptotics][property]") {
    const double eps = GENERATE(take(10, random(0.1, 10.0)));
    const double tau0 = GENERATE(take(5, random(1.0, 1000.0)));
    const auto s = lz::amplitudes_negative(tau0, {eps, tau0});
    CHECK(std::abs(s.a - 1.0) <= 1e-12);
    CHECK(std::abs(s.b) <= 1e-12);
}

TEST_CASE("negative-time superposition against the ODE", "[asymptotics]") {
    const auto num = numeric_at(reference_config, -10.0);
    const auto s = lz::amplitudes_negative(10.0, reference_config);
    CHECK(max_component(s.a - num.a) <= 2e-3);
    CHECK(max_component(s.b - num.b) <= 2e-3);
    CHECK_THAT(std::abs(num.b), WithinRel(1.0 / 60.0, 0.2));
    CHECK_THAT(std::abs(s.b), WithinRel(1.0 / 60.0, 0.2));
}

TEST_CASE("negative-time domain", "[asymptotics]") {
    CHECK_THROWS_AS(lz::amplitudes_negative(0.0, reference_config), lz::DomainError);
    CHECK_THROWS_AS(lz::amplitudes_negative(5e-7, reference_config), lz::DomainError);
    CHECK_THROWS_AS(lz::amplitudes_negative(101.0, reference_config), lz::DomainError);
    CHECK_THROWS_AS(lz::amplitudes_negative(10.0, {0.0, 100.0}), lz::DomainError);
    CHECK_THROWS_AS(lz::coeffs_negative({3.0, 1e-7}), lz::DomainError);
    CHECK_NOTHROW(lz::amplitudes_negative(lz::tau_min, reference_config));
}

TEST_CASE("leading negative-time amplitude", "[asymptotics]") {
    CHECK(lz::amplitude_a_negative_leading(100.0, reference_config) == cplx{1.0, 0.0});
    const cplx v = lz::amplitude_a_negative_leading(50.0, reference_config);
    CHECK_THAT(std::arg(v), WithinAbs(std::remainder(-11250.115524530093, 2 * lz::pi), 1e-10));
    const double t = GENERATE(take(50, random(1e-6, 100.0)));
    CHECK_THAT(std::abs(lz::amplitude_a_negative_leading(t, reference_config)), WithinAbs(1.0, 1e-15));
}

TEST_CASE("heuristic continuation through the crossing", "[asymptotics]") {
    CHECK_THAT(std::abs(lz::heuristic_positive_a(100.0, reference_config)), WithinRel(0.59238484718838898, 1e-14));
    const double t = GENERATE(take(30, random(1e-6, 100.0)));
    const cplx h = lz::heuristic_positive_a(t, reference_config);
    const cplx expected = std::exp(-lz::pi / 6.0) * lz::amplitude_a_negative_leading(t, reference_config);
    CHECK(std::abs(h - expected) <= 1e-15);
    CHECK_THAT(std::abs(h), WithinRel(std::exp(-lz::pi / 6.0), 1e-14));
}

TEST_CASE("the lower logarithm branch gives a growing amplitude", "[asymptotics]") {
    const double eps = GENERATE(0.5, 1.0, 3.0, 10.0);
    const lz::LZConfig c{eps, 100.0};
    const double m = std::abs(lz::heuristic_positive_a(40.0, c, lz::LogBranch::lower));
    CHECK_THAT(m, WithinRel(std::exp(lz::pi / (2 * eps)), 1e-14));
    CHECK(m > 1.0);
    CHECK(std::abs(lz::heuristic_positive_a(40.0, c, lz::LogBranch::upper)) < 1.0);
}

TEST_CASE("positive-time superposition against the ODE", "[asymptotics]") {
    const auto k = lz::matching_coeffs(3.0);
    for (double tau : {50.0, 100.0}) {
        const auto num = numeric_at(reference_config, tau);
        const auto s = lz::amplitudes_positive(tau, reference_config, k);
        CAPTURE(tau);
        CHECK(max_component(s.a - num.a) <= 2e-3);
        CHECK(max_component(s.b - num.b) <= 2e-3);
    }
}

TEST_CASE("positive-time error at tau0 decreases with tau0", "[asymptotics]") {
    const auto k = lz::matching_coeffs(3.0);
    const auto err = [&](double tau0) {
        const lz::LZConfig c{3.0, tau0};
        const auto num = numeric_at(c, tau0);
        const auto s = lz::amplitudes_positive(tau0, c, k);
        return std::max(max_component(s.a - num.a), max_component(s.b - num.b));
    };
    const double e100 = err(100.0), e200 = err(200.0);
    CHECK(e100 <= 2e-3);
    CHECK(e200 < e100);
}

TEST_CASE("four-term form is the more accurate one", "[asymptotics]") {
    const auto k = lz::matching_coeffs(3.0);
    const lz::ExactSolution ex(reference_config);
    double lead = 0.0, full = 0.0;
    for (double tau = 10.0; tau <= 100.0; tau += 3.0) {
        const auto e = ex.amplitudes(tau);
        const auto l = lz::amplitudes_positive(tau, reference_config, k, lz::PositiveForm::leading);
        const auto f = lz::amplitudes_positive(tau, reference_config, k, lz::PositiveForm::finite_tau0);
        lead = std::max({lead, std::abs(l.a - e.a), std::abs(l.b - e.b)});
        full = std::max({full, std::abs(f.a - e.a), std::abs(f.b - e.b)});
    }
    CHECK(full < lead);
    CHECK(full < 1e-3);
}

TEST_CASE("Stueckelberg envelope and limits", "[asymptotics]") {
    const auto k = lz::matching_coeffs(3.0);
    CHECK_THAT(lz::stueckelberg_envelope(100.0, 3.0, k), WithinRel(1.34e-3, 0.01));

    const lz::LZConfig far{3.0, 1e7};
    const auto s = lz::amplitudes_positive(1e7, far, k);
    CHECK_THAT(std::abs(s.a), WithinAbs(std::exp(-lz::pi / 6.0), 1e-7));
    CHECK_THAT(std::abs(s.b), WithinAbs(std::sqrt(1.0 - std::exp(-lz::pi / 3.0)), 1e-7));
}

TEST_CASE("positive-time domain", "[asymptotics]") {
    auto k = lz::matching_coeffs(3.0);
    CHECK_THROWS_AS(lz::amplitudes_positive(0.0, reference_config, k), lz::DomainError);
    CHECK_THROWS_AS(lz::amplitudes_positive(200.0, reference_config, k), lz::DomainError);
    k.delta = {std::nan(""), 0.0};
    CHECK_THROWS_AS(lz::amplitudes_positive(10.0, reference_config, k), lz::DomainError);
}

TEST_CASE("asymptotic limits", "[asymptotics]") {
    const auto k = lz::matching_coeffs(3.0);
    const auto lim = lz::asymptotic_limits(reference_config, k);
    CHECK_THAT(std::abs(lim.a_limit), WithinRel(0.59238484718838898, 1e-14));
    CHECK_THAT(std::abs(lim.b_limit), WithinRel(0.80565513268494047, 1e-13));
    CHECK_THAT(std::remainder(lim.phi_b - lz::phase_b_closed_form(reference_config), 2 * lz::pi),
               WithinAbs(0.0, 1e-9));

    const auto num = numeric_at(reference_config, 100.0);
    CHECK(std::abs(std::remainder(std::arg(num.b) - lim.phi_b, 2 * lz::pi)) <= 5e-3);
}

TEST_CASE("limits hold for any chirp", "[asymptotics][property]") {
    const double eps = GENERATE(take(20, random(0.2, 20.0)));
    const lz::LZConfig c{eps, 50.0};
    const auto lim = lz::asymptotic_limits(c, lz::matching_coeffs(eps));
    CHECK_THAT(std::norm(lim.a_limit) + std::norm(lim.b_limit), WithinAbs(1.0, 1e-12));
    CHECK_THAT(std::remainder(lim.phi_b - lz::phase_b_closed_form(c), 2 * lz::pi), WithinAbs(0.0, 1e-9));
}

TEST_CASE("Stueckelberg oscillations decay as 1/tau", "[asymptotics]") {
    const auto k = lz::matching_coeffs(3.0);
    lz::SolverOptions o;
    o.sample_grid = lz::oscillation_grid(3.0, 10.0, 100.0);
    const auto tr = lz::integrate(reference_config, o);
    const auto fit = lz::fit_envelope(tr, lz::oscillation_center(reference_config, k), 10.0, 100.0);
    CHECK(fit.maxima >= 5);
    CHECK_THAT(fit.exponent, WithinAbs(-1.0, 0.1));
    // the amplitude of the fit is the closed-form envelope coefficient
    CHECK_THAT(fit.amplitude, WithinRel(lz::stueckelberg_envelope(1.0, 3.0, k), 0.05));
}

TEST_CASE("verification by differentiation", "[asymptotics]") {
    CHECK(lz::residual_check(10.0, reference_config, 0.0, 0.0) == 0.0);
    const double r10 = lz::residual_check(10.0, reference_config, 1.0, 0.0);
    const double r100 = lz::residual_check(100.0, reference_config, 1.0, 0.0);
    CHECK(r10 > 0.0);
    // 1/tau^2: residual(100) = residual(10) * 1e-2 within a factor 3
    CHECK(r100 <= 3.0 * r10 * 1e-2);
    CHECK(r100 >= r10 * 1e-2 / 3.0);
    double lo = INFINITY, hi = 0.0;
    for (double t = 10.0; t <= 100.0; t += 1.0) {
        const double s = lz::residual_check(t, reference_config, 1.0, 0.0) * t * t;
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    CHECK(hi <= 3.0 * lo);
    CHECK_THROWS_AS(lz::residual_check(0.0, reference_config, 1.0, 0.0), lz::DomainError);
}

TEST_CASE("residual of general superpositions decays as 1/tau^2", "[asymptotics][property]") {
    const double ar = GENERATE(take(5, random(-1.0, 1.0)));
    const double bi = GENERATE(take(5, random(-1.0, 1.0)));
    const cplx alpha{ar, 0.3}, beta{0.2, bi};
    const double sign = GENERATE(-1.0, 1.0);
    const double r20 = lz::residual_check(sign * 20.0, reference_config, alpha, beta);
    const double r80 = lz::residual_check(sign * 80.0, reference_config, alpha, beta);
    CHECK(r80 * 80.0 * 80.0 <= 3.0 * r20 * 20.0 * 20.0);
    CHECK(r80 * 80.0 * 80.0 >= r20 * 20.0 * 20.0 / 3.0);
}
