#include "oracles.hpp"

#include "squeezecav/errors.hpp"
#include "squeezecav/steady_state.hpp"

#include <doctest.h>

#include <cmath>

using namespace squeezecav;

namespace {

ErrorKind kind_of(auto &&fn) {
    try {
        fn();
    } catch (const Error &e) {
        return e.kind();
    }
    FAIL("expected an exception");
    return ErrorKind::Invariant;
}

bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(1.0, std::abs(b)); }

IntegrationControl ctrl(double tau_end) {
    IntegrationControl c;
    c.tau_end = tau_end;
    c.sample_every = 10;
    return c;
}

} // namespace

TEST_CASE("steady_state examples") {
    const auto zero = steady_state(0.0);
    CHECK(zero.u_ss == 0.0);
    CHECK(zero.n_th_ss == 0.0);
    CHECK(zero.n_mean_ss == 0.0);
    CHECK(zero.dx_ss == 1.0);
    CHECK_FALSE(zero.g2_ss.has_value());

    const auto ss = steady_state(0.8);
    CHECK(ss.n_th_ss == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(ss.n_mean_ss == doctest::Approx(8.0 / 9.0).epsilon(1e-14));

    // long-time integration of the equations of motion as the independent route;
    // the slow mode relaxes at rate 1 - g, so tau = 100 leaves ~e^-20
    const auto t = integrate(StsState::vacuum(), PumpConfig{0.8}, ctrl(100.0));
    CHECK(std::abs(t.states.back().n_th - ss.n_th_ss) < 1e-6);
    CHECK(std::abs(t.observables.back().n_mean - ss.n_mean_ss) < 1e-6);

    CHECK(kind_of([] { steady_state(1.0); }) == ErrorKind::NoSteadyState);
    CHECK(kind_of([] { steady_state(1.5); }) == ErrorKind::NoSteadyState);
    CHECK(kind_of([] { steady_state(-0.1); }) == ErrorKind::Domain);
}

TEST_CASE("steady state satisfies the fixed-point relations and STS formulas") {
    for (int k = 1; k <= 99; ++k) {
        const double g = k / 100.0;
        const auto ss = steady_state(g);
        REQUIRE(close(svs_photon(ss.u_ss), ss.n_th_ss, 1e-12));
        REQUIRE(close(std::tanh(2.0 * ss.u_ss), g, 1e-12));

        const auto var = quadrature_variances(ss.state());
        REQUIRE(close(var.x, ss.dx_ss * ss.dx_ss, 1e-12));
        REQUIRE(close(var.y, ss.dy_ss * ss.dy_ss, 1e-12));
        REQUIRE(close(mean_photon(ss.state()), ss.n_mean_ss, 1e-12));
        REQUIRE(close(g2(ss.state()), *ss.g2_ss, 1e-12));
        REQUIRE(close(uncertainty_product(ss.state()), ss.product_ss, 1e-12));
    }
}

TEST_CASE("quad_limits") {
    const auto strong = quad_limits(1.2);
    CHECK(std::abs(strong.dx_ss - 0.674) <= 0.001);
    CHECK_FALSE(strong.dy_ss.has_value());
    CHECK_FALSE(strong.product_ss.has_value());

    const auto q = quad_limits(std::sqrt(3.0) / 2.0);
    CHECK(std::abs(*q.product_ss - 2.0) <= 1e-3);
    CHECK(std::abs(q.dx_ss - 0.732) <= 0.001);

    const auto vac = quad_limits(0.0);
    CHECK(vac.dx_ss == 1.0);
    CHECK(*vac.dy_ss == 1.0);
    CHECK(*vac.product_ss == 1.0);

    CHECK_FALSE(quad_limits(1.0).dy_ss.has_value());
    CHECK(kind_of([] { quad_limits(-1.0); }) == ErrorKind::Domain);
}

TEST_CASE("g2_ss") {
    CHECK(std::abs(g2_ss(0.9) - 3.23) <= 0.02);
    CHECK(std::abs(g2_ss(0.9999) - 3.0) <= 0.01);

    const double g = 0.01;
    const double n_mean = g * g / (2.0 * (1.0 - g * g));
    const double expansion = 2.0 + 1.0 / (2.0 * n_mean);
    CHECK(std::abs(g2_ss(g) - expansion) / expansion < 1e-3);

    CHECK(kind_of([] { g2_ss(0.0); }) == ErrorKind::UndefinedCorrelation);
    CHECK(kind_of([] { g2_ss(1.0); }) == ErrorKind::NoSteadyState);
}

TEST_CASE("g2_ss decreases monotonically towards 3 and stays above it") {
    double previous = g2_ss(0.005);
    for (int k = 1; k < 100; ++k) {
        const double g = 0.005 + k * (0.99 / 100.0);
        const double value = g2_ss(g);
        REQUIRE(value < previous);
        REQUIRE(value > 3.0);
        previous = value;
    }
}

TEST_CASE("svs_g2") {
    CHECK(svs_g2(1e9) == doctest::Approx(3.0 + 1e-9).epsilon(1e-15));
    CHECK(svs_g2(1.0) == 4.0);
    CHECK(svs_g2(1.0) == doctest::Approx(g2({std::asinh(1.0), 0.0, 0.0})).epsilon(1e-14));
    CHECK(kind_of([] { svs_g2(0.0); }) == ErrorKind::UndefinedCorrelation);

    // at <n> = 1e-3 a squeezed vacuum bunches twice as strongly as the STS
    const double target = 1e-3;
    const double g = oracle::bisect([&](double x) { return steady_mean_photon(x) - target; }, 1e-6, 0.5);
    CHECK(steady_mean_photon(g) == doctest::Approx(target).epsilon(1e-12));
    CHECK(std::abs(svs_g2(target) / g2_ss(g) - 2.0) <= 0.05);
}

TEST_CASE("weak pumping limits") {
    for (int k = 0; k < 100; ++k) {
        const double g = (k + 0.5) / 100.0;
        REQUIRE(quad_limits(g).dx_ss > 1.0 / std::sqrt(2.0));
    }
    CHECK(std::abs(steady_nth(1e-3) / steady_mean_photon(1e-3) - 0.5) <= 1e-3);
    // the thermal fraction is exactly r / (1 + r) with r = sqrt(1 - g^2)
    for (double g : {0.1, 0.5, 0.9, 0.9999}) {
        const double r = std::sqrt(1.0 - g * g);
        CHECK(steady_nth(g) / steady_mean_photon(g) == doctest::Approx(r / (1.0 + r)).epsilon(1e-12));
    }
    CHECK(steady_nth(0.99999) / steady_mean_photon(0.99999) < 0.01);
}

TEST_CASE("find_threshold at critical pumping") {
    const auto r = find_threshold(1.0, 0.1, ctrl(20.0));
    CHECK(std::abs(r.tau_star - 0.78) <= 0.02);
    CHECK(std::abs(r.observables_at_threshold.n_mean - 0.096) <= 0.005);
    CHECK(std::abs(r.observables_at_threshold.dx - 1.1 / std::sqrt(2.0)) < 1e-9);
    CHECK(r.target_dx == doctest::Approx(1.1 / std::sqrt(2.0)));

    // independent re-integration with a ten times finer step to tau*
    IntegrationControl fine;
    fine.dtau = 1e-4;
    fine.tau_end = r.tau_star;
    fine.sample_every = 1000000;
    const auto t = integrate(StsState::vacuum(), PumpConfig{1.0}, fine);
    CHECK(std::abs(t.observables.back().dx - r.target_dx) < 1e-8);
}

TEST_CASE("find_threshold in strong pumping") {
    const auto r = find_threshold(100.0, 0.2, ctrl(20.0));
    CHECK(std::abs(r.observables_at_threshold.dx - 0.119) <= 0.002);
    CHECK(uncertainty_product(r.state_at_threshold) < 2.0);
    CHECK(r.observables_at_threshold.dy * r.observables_at_threshold.dx ==
          doctest::Approx(uncertainty_product(r.state_at_threshold)));

    double previous = 1e9;
    for (double g : {5.0, 10.0, 50.0, 100.0}) {
        const auto t = find_threshold(g, 0.2, ctrl(20.0));
        REQUIRE(t.tau_star < previous);
        previous = t.tau_star;
    }
}

TEST_CASE("find_threshold edge cases") {
    const auto immediate = find_threshold(0.8, 10.0, ctrl(5.0));
    CHECK(immediate.tau_star == 0.0);
    CHECK(immediate.state_at_threshold == StsState::vacuum());

    try {
        find_threshold(0.8, 0.01, ctrl(1.0));
        FAIL("expected not-reached");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::NotReached);
        REQUIRE(e.value().has_value());
        CHECK(*e.value() > 1.01 / std::sqrt(1.8));
    }
    CHECK(kind_of([] { find_threshold(0.0, 0.1, ctrl(1.0)); }) == ErrorKind::Domain);
    CHECK(kind_of([] { find_threshold(1.0, 0.0, ctrl(1.0)); }) == ErrorKind::Domain);
}
