#include <catch_amalgamated.hpp>

#include <chrono>
#include <cmath>

#include "lz/integrator.hpp"
#include "lz/pcf.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using lz::cplx;

namespace {

constexpr cplx I{0.0, 1.0};

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    g.back() = b;
    return g;
}

double max_component(cplx d) { return std::max(std::abs(d.real()), std::abs(d.imag())); }

}  // namespace

TEST_CASE("rhs examples", "[integrator]") {
    const double tau0 = 7.0, eps = 2.0;
    const auto d = lz::rhs(-tau0, {{1, 0}, {0, 0}}, eps);
    CHECK(d.a == -I * eps * tau0);
    CHECK(d.b == -I);
    const auto d0 = lz::rhs(0.0, {{1, 0}, {0, 0}}, eps);
    CHECK(d0.a == cplx{0, 0});
    CHECK(d0.b == -I);
    const auto z = lz::rhs(3.3, {{0, 0}, {0, 0}}, eps);
    CHECK(z.a == cplx{0, 0});
    CHECK(z.b == cplx{0, 0});
}

TEST_CASE("Rabi oscillation at zero chirp", "[integrator]") {
    // eps = 0, tau0 = 0, over [0, pi/2]
    const auto tr = lz::propagate(0.0, 0.0, lz::pi / 2, {}, {});
    REQUIRE(tr.points.size() == 2);
    const auto& end = tr.points.back().amps;
    CHECK_THAT(std::abs(end.a), WithinAbs(0.0, 1e-10));
    CHECK_THAT(end.b.real(), WithinAbs(0.0, 1e-10));
    CHECK_THAT(end.b.imag(), WithinAbs(-1.0, 1e-10));
}

TEST_CASE("Rabi oracle over twenty time units", "[integrator]") {
    lz::SolverOptions o;
    o.sample_grid = linspace(0.0, 20.0, 401);
    const auto tr = lz::propagate(0.0, 0.0, 20.0, {}, o);
    double worst = 0.0;
    for (const auto& p : tr.points) {
        worst = std::max(worst, std::abs(p.amps.a - std::cos(p.tau)));
        worst = std::max(worst, std::abs(p.amps.b + I * std::sin(p.tau)));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("integrate with eps = 0 is the Rabi solution from -tau0", "[integrator]") {
    const auto tr = lz::integrate({0.0, 1.5}, {});
    const auto& e = tr.points.back().amps;
    CHECK_THAT(std::abs(e.a - std::cos(3.0)), WithinAbs(0.0, 1e-10));
    CHECK_THAT(std::abs(e.b + I * std::sin(3.0)), WithinAbs(0.0, 1e-10));
}

TEST_CASE("integrate at the reference configuration", "[integrator]") {
    const lz::LZConfig c{3.0, 100.0};
    lz::SolverOptions o;
    o.sample_grid = linspace(-100.0, 100.0, 2001);
    const auto t0 = std::chrono::steady_clock::now();
    const auto tr = lz::integrate(c, o);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    REQUIRE(tr.points.size() == 2001);
    CHECK(tr.method == lz::Method::numeric);
    CHECK(tr.points.front().tau == -100.0);
    CHECK(tr.points.front().amps.a == cplx{1, 0});
    CHECK(tr.points.front().amps.b == cplx{0, 0});
    CHECK(secs < 10.0);

    double worst_norm = 0.0;
    for (const auto& p : tr.points) worst_norm = std::max(worst_norm, p.norm_error);
    CHECK(worst_norm <= 1e-8);
    CHECK(worst_norm <= 100 * o.rtol);

    // The end value carries a finite-tau0 Stueckelberg offset of up to |chi|/(eps tau0)
    // from e^{-pi/6}; the exact solution pins it.
    const double abs_a = std::abs(tr.points.back().amps.a);
    CHECK_THAT(abs_a, WithinAbs(0.5947336594061058, 1e-8));
    CHECK(std::abs(abs_a - lz::lz_values(3.0).a) <= std::abs(lz::chi(3.0)) / (3.0 * 100.0));

    for (std::size_t i = 1; i < tr.points.size(); ++i) CHECK(tr.points[i].tau > tr.points[i - 1].tau);
}

TEST_CASE("unwrapped phases are continuous along a numeric trajectory", "[integrator]") {
    lz::SolverOptions o;
    o.sample_grid = linspace(-20.0, 20.0, 4001);
    const auto tr = lz::integrate({1.0, 20.0}, o);
    for (std::size_t i = 0; i < tr.points.size(); ++i) {
        const auto& p = tr.points[i];
        const double ka = (p.phase_a - std::arg(p.amps.a)) / (2 * lz::pi);
        const double kb = (p.phase_b - std::arg(p.amps.b)) / (2 * lz::pi);
        CHECK_THAT(ka, WithinAbs(std::round(ka), 1e-6));
        if (i > 0) {
            CHECK_THAT(kb, WithinAbs(std::round(kb), 1e-6));
            CHECK(std::abs(p.phase_a - tr.points[i - 1].phase_a) < lz::pi);
        }
    }
}

TEST_CASE("halving the tolerances stays within the coarse error estimate", "[integrator]") {
    const lz::LZConfig c{1.0, 20.0};
    lz::SolverOptions coarse;
    coarse.rtol = 1e-8;
    coarse.atol = 1e-10;
    coarse.sample_grid = linspace(-20.0, 20.0, 101);
    lz::SolverOptions fine = coarse;
    fine.rtol /= 2;
    fine.atol /= 2;
    const auto a = lz::integrate(c, coarse);
    const auto b = lz::integrate(c, fine);
    const double estimate = a.solver_meta.accumulated_error;
    REQUIRE(estimate > 0.0);
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(std::abs(a.points[i].amps.a - b.points[i].amps.a) < estimate);
        CHECK(std::abs(a.points[i].amps.b - b.points[i].amps.b) < estimate);
    }
}

TEST_CASE("time reversal recovers the initial state", "[integrator]") {
    const double eps = GENERATE(0.5, 1.0, 3.0);
    const double tau0 = 30.0;
    const auto fwd = lz::propagate(eps, -tau0, tau0, {}, {});
    const auto back = lz::propagate(eps, tau0, -tau0, fwd.points.back().amps, {});
    const auto& e = back.points.back().amps;
    CHECK(std::abs(e.a - 1.0) <= 1e-8);
    CHECK(std::abs(e.b) <= 1e-8);
}

TEST_CASE("numeric flow matches the exact solution", "[integrator][property]") {
    const double eps = GENERATE(take(3, random(0.5, 4.0)));
    const double tau0 = GENERATE(take(2, random(2.0, 8.0)));
    const lz::LZConfig c{eps, tau0};
    lz::SolverOptions o;
    o.sample_grid = linspace(-tau0, tau0, 41);
    const auto tr = lz::integrate(c, o);
    const lz::ExactSolution ex(c);
    for (const auto& p : tr.points) {
        const auto e = ex.amplitudes(p.tau);
        CHECK(max_component(p.amps.a - e.a) <= 1e-6);
        CHECK(max_component(p.amps.b - e.b) <= 1e-6);
    }
}

TEST_CASE("integrator errors", "[integrator]") {
    lz::SolverOptions o;
    o.max_steps = 100;
    CHECK_THROWS_AS(lz::integrate({3.0, 100.0}, o), lz::StepLimitExceeded);

    lz::SolverOptions tight;
    tight.rtol = 1e-30;
    tight.atol = 1e-300;
    CHECK_THROWS_AS(lz::integrate({1.0, 5.0}, tight), lz::ToleranceFailure);

    lz::SolverOptions bad;
    bad.rtol = 0.0;
    CHECK_THROWS_AS(lz::integrate({1.0, 5.0}, bad), lz::DomainError);
    CHECK_THROWS_AS(lz::integrate({-1.0, 5.0}, {}), lz::DomainError);

    lz::SolverOptions outside;
    outside.sample_grid = {-5.0, 6.0};
    CHECK_THROWS_AS(lz::integrate({1.0, 5.0}, outside), lz::DomainError);
    lz::SolverOptions unordered;
    unordered.sample_grid = {1.0, 0.0};
    CHECK_THROWS_AS(lz::integrate({1.0, 5.0}, unordered), lz::DomainError);
}

TEST_CASE("sweep over chirps", "[integrator]") {
    const std::vector<lz::LZConfig> configs{{1.0, 100.0}, {2.0, 100.0}, {3.0, 100.0}};
    const auto rows = lz::sweep(configs, {}, 3);
    REQUIRE(rows.size() == 3);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        REQUIRE(rows[i].final_amps.has_value());
        const double eps = configs[i].epsilon;
        const double abs_a = std::abs(rows[i].final_amps->a);
        // the exact solution at +tau0 pins the value; the offset from e^{-pi/(2 eps)}
        // is the finite-tau0 Stueckelberg amplitude |chi|/(eps tau0) up to second-order terms
        CHECK_THAT(abs_a, WithinAbs(std::abs(lz::exact_a(100.0, configs[i])), 1e-7));
        const double x = 1.0 / (eps * 100.0);
        CHECK(std::abs(abs_a - lz::lz_values(eps).a) <= std::abs(lz::chi(eps)) * x + x * x);
    }
}

TEST_CASE("sweep edge cases", "[integrator]") {
    CHECK(lz::sweep(std::vector<lz::LZConfig>{}, {}, 4).empty());

    const std::vector<lz::LZConfig> dup{{1.0, 10.0}, {1.0, 10.0}, {2.0, 10.0}, {1.0, 10.0}};
    const auto rows = lz::sweep(dup, {}, 4);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].final_amps->a == rows[1].final_amps->a);
    CHECK(rows[0].final_amps->b == rows[3].final_amps->b);
    const auto serial = lz::sweep(dup, {}, 1);
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].final_amps->a == serial[i].final_amps->a);

    // a failing row is reported and the others are unaffected
    lz::SolverOptions o;
    o.max_steps = 20'000;
    const std::vector<lz::LZConfig> mixed{{1.0, 5.0}, {3.0, 100.0}, {1.0, 5.0}};
    const auto m = lz::sweep(mixed, o, 2);
    CHECK(m[0].final_amps.has_value());
    CHECK_FALSE(m[1].final_amps.has_value());
    CHECK(m[1].error.find("max_steps") != std::string::npos);
    CHECK(m[2].final_amps.has_value());
}
