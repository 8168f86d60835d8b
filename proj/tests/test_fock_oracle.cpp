#include "oracles.hpp"

#include "squeezecav/errors.hpp"
#include "squeezecav/fock_oracle.hpp"
#include "squeezecav/sts_dynamics.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace squeezecav;

namespace {

IntegrationControl ctrl(double tau_end, int sample_every = 10) {
    IntegrationControl c;
    c.tau_end = tau_end;
    c.sample_every = sample_every;
    return c;
}

ComplexMatrix random_density(int dim, std::mt19937_64 &rng) {
    std::normal_distribution<double> normal;
    ComplexMatrix a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            a(i, j) = {normal(rng), normal(rng)};
    ComplexMatrix rho = a * a.adjoint();
    return rho / rho.trace().real();
}

} // namespace

TEST_CASE("build_operators") {
    const auto two = build_operators(2);
    CHECK(two.lowering(0, 1) == std::complex<double>(1.0, 0.0));
    CHECK(two.lowering(1, 0) == std::complex<double>(0.0, 0.0));
    CHECK(two.lowering(0, 0) == std::complex<double>(0.0, 0.0));
    CHECK(two.lowering(1, 1) == std::complex<double>(0.0, 0.0));

    const auto three = build_operators(3);
    for (int m = 0; m < 3; ++m)
        CHECK(three.number(m, m).real() == doctest::Approx(m));
    CHECK((three.number - three.number.diagonal().asDiagonal().toDenseMatrix()).norm() == 0.0);

    const auto ops = build_operators(64);
    const ComplexMatrix comm = ops.lowering * ops.raising - ops.raising * ops.lowering;
    for (int m = 0; m < 62; ++m)
        REQUIRE(std::abs(comm(m, m) - 1.0) < 1e-12);
    CHECK((ops.lowering_sq - ops.lowering * ops.lowering).norm() < 1e-12);
    CHECK((ops.raising - ops.lowering.adjoint()).norm() == 0.0);

    CHECK_THROWS_AS(build_operators(1), Error);
}

TEST_CASE("lindblad_rhs examples") {
    const auto vac = FockDensityMatrix::vacuum(8);
    CHECK(lindblad_rhs(vac.entries(), 0.0).norm() == 0.0);

    ComplexMatrix one = ComplexMatrix::Zero(8, 8);
    one(1, 1) = 1.0;
    const ComplexMatrix d = lindblad_rhs(one, 0.0);
    CHECK(d(0, 0).real() == doctest::Approx(1.0));
    CHECK(d(1, 1).real() == doctest::Approx(-1.0));
}

TEST_CASE("lindblad_rhs agrees with the operator-product form and preserves trace") {
    std::mt19937_64 rng(11);
    for (int dim : {4, 17, 40}) {
        for (double g : {0.0, 0.4, 1.2, 10.0}) {
            const ComplexMatrix rho = random_density(dim, rng);
            const ComplexMatrix fast = lindblad_rhs(rho, g);
            const ComplexMatrix slow = oracle::lindblad_by_products(rho, g);
            REQUIRE((fast - slow).cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, slow.cwiseAbs().maxCoeff()));
            REQUIRE(std::abs(fast.trace()) < 1e-12);
        }
    }
}

TEST_CASE("observables_from_rho") {
    const auto vac = observables_from_rho(FockDensityMatrix::vacuum(16));
    CHECK(vac.dx == doctest::Approx(1.0));
    CHECK(vac.dy == doctest::Approx(1.0));
    CHECK(vac.n_mean == 0.0);
    CHECK_FALSE(vac.g2.has_value());

    const auto thermal = FockDensityMatrix::thermal(1.0, 64);
    CHECK(thermal.entries()(3, 3).real() == doctest::Approx(0.0625));
    const auto obs = observables_from_rho(thermal);
    CHECK(std::abs(obs.n_mean - 1.0) < 1e-12);
    REQUIRE(obs.g2.has_value());
    CHECK(std::abs(*obs.g2 - 2.0) < 1e-10);

    const auto sts = observables_from_rho(sts_density_matrix(0.5493, 0.0, 1.0 / 3.0, 128));
    CHECK(sts.dx == doctest::Approx(0.7454).epsilon(1e-4));
}

TEST_CASE("sts_density_matrix") {
    const auto vac = sts_density_matrix(0.0, 0.0, 0.0, 16);
    CHECK((vac.entries() - FockDensityMatrix::vacuum(16).entries()).norm() < 1e-15);

    const auto th = sts_density_matrix(0.0, 0.0, 1.0, 64);
    for (int m = 0; m < 10; ++m)
        CHECK(th.entries()(m, m).real() == doctest::Approx(0.5 * std::pow(0.5, m)).epsilon(1e-12));

    // matches the core closed forms and an independent Taylor-series squeeze
    const StsState s{0.5, 0.0, 0.2};
    const auto rho = sts_density_matrix(s.u, s.phi, s.n_th, 128);
    const auto obs = observables_from_rho(rho);
    const auto ref = observables(s);
    CHECK(std::abs(obs.dx - ref.dx) < 1e-8);
    CHECK(std::abs(obs.dy - ref.dy) < 1e-8);
    CHECK(std::abs(obs.product - ref.product) < 1e-8);
    CHECK(std::abs(obs.n_mean - ref.n_mean) < 1e-8);
    CHECK(std::abs(*obs.g2 - *ref.g2) < 1e-8);

    const ComplexMatrix taylor = oracle::sts_by_taylor(s.u, s.phi, s.n_th, 128, 256);
    CHECK((rho.entries() - taylor).cwiseAbs().maxCoeff() < 1e-10);

    const ComplexMatrix rotated = oracle::sts_by_taylor(0.7, 1.1, 0.3, 96, 192);
    CHECK((sts_density_matrix(0.7, 1.1, 0.3, 96).entries() - rotated).cwiseAbs().maxCoeff() < 1e-10);

    // purity of an STS is that of its thermal core
    CHECK(rho.purity() == doctest::Approx(1.0 / (2.0 * s.n_th + 1.0)).epsilon(1e-10));

    CHECK_THROWS_AS(sts_density_matrix(0.0, 0.0, 5.0, 16), Error);
    CHECK_THROWS_AS(sts_density_matrix(3.0, 0.0, 0.0, 16), Error);
}

TEST_CASE("trace_distance") {
    const auto a = FockDensityMatrix::vacuum(8);
    ComplexMatrix one = ComplexMatrix::Zero(8, 8);
    one(1, 1) = 1.0;
    CHECK(trace_distance(a, a) == doctest::Approx(0.0));
    CHECK(trace_distance(a, FockDensityMatrix(one)) == doctest::Approx(1.0));
    CHECK(trace_distance(FockDensityMatrix::vacuum(4), a) == doctest::Approx(0.0));
}

TEST_CASE("evolve_rho: vacuum is stationary without pump") {
    const auto t = evolve_rho(FockDensityMatrix::vacuum(16), 0.0, ctrl(5.0, 500));
    for (const auto &rho : t.states)
        REQUIRE((rho.entries() - FockDensityMatrix::vacuum(16).entries()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("evolve_rho: weak pumping tracks the STS equations") {
    const auto c = ctrl(2.0, 100);
    const auto fock = evolve_rho(FockDensityMatrix::vacuum(64), 0.8, c);
    const auto sts = integrate(StsState::vacuum(), PumpConfig{0.8}, c);
    REQUIRE(fock.tau.size() == sts.size());
    for (std::size_t i = 0; i < sts.size(); ++i) {
        REQUIRE(fock.tau[i] == sts.tau[i]);
        const auto obs = observables_from_rho(fock.states[i]);
        REQUIRE(std::abs(obs.dx - sts.observables[i].dx) < 1e-5);
        REQUIRE(std::abs(std::abs(fock.states[i].trace()) - 1.0) < 1e-9);
        REQUIRE(fock.states[i].hermiticity_error() == 0.0);
    }
    CHECK(fock.max_trace_drift < 1e-9);
    CHECK(fock.max_hermiticity_drift < 1e-10);
}

TEST_CASE("evolve_rho: strong pumping eventually exhausts the basis") {
    FockEvolverOptions opts;
    opts.max_dim = 32;
    try {
        evolve_rho(FockDensityMatrix::vacuum(8), 1.2, ctrl(20.0, 100), opts);
        FAIL("expected truncation error");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::Truncation);
        REQUIRE(e.tau().has_value());
        CHECK(*e.tau() > 0.0);
        CHECK(*e.tau() < 20.0);
        REQUIRE(e.value().has_value());
        CHECK(*e.value() > 0.0);
    }
}

TEST_CASE("evolve_rho grows the basis when needed") {
    FockEvolver ev(FockDensityMatrix::vacuum(8), 1.0, 1e-3);
    ev.advance_to(2.0);
    CHECK(ev.dim() > 8);
    CHECK(ev.rho().top_population() < 1e-10);
    CHECK(ev.tau() == doctest::Approx(2.0));
}

TEST_CASE("compare_trajectories: unpumped vacuum") {
    const auto c = ctrl(3.0, 100);
    const auto t = integrate(StsState::vacuum(), PumpConfig{0.0}, c);
    OracleComparisonOptions opts;
    opts.initial_dim = 8;
    const auto r = compare_trajectories(t, 0.0, c, opts);
    CHECK(r.max_dev_dx < 1e-12);
    CHECK(r.max_dev_dy < 1e-12);
    CHECK(r.max_dev_n_mean < 1e-12);
    CHECK(r.max_dev_g2 == 0.0);
    CHECK(r.max_trace_distance < 1e-12);
    CHECK_FALSE(r.truncation_note.has_value());
    CHECK(r.samples_compared == t.size());
}

TEST_CASE("compare_trajectories: ansatz is exact for weak and strong pumping") {
    for (auto [g, tau_end] : {std::pair{0.8, 5.0}, std::pair{1.2, 3.0}}) {
        const auto c = ctrl(tau_end, 10);
        const auto t = integrate(StsState::vacuum(), PumpConfig{g}, c);
        const auto r = compare_trajectories(t, g, c);
        CHECK(r.max_dev_dx < 1e-4);
        CHECK(r.max_dev_dy < 1e-4);
        CHECK(r.max_dev_n_mean < 1e-4);
        CHECK(r.max_dev_g2 < 1e-3);
        CHECK(r.max_trace_distance < 1e-5);
        CHECK(r.max_purity_deviation < 1e-5);
        CHECK(r.max_trace_drift < 1e-9);
        CHECK_FALSE(r.truncation_note.has_value());
        CHECK(r.usable_tau_end == doctest::Approx(tau_end));
    }
}

TEST_CASE("compare_trajectories records truncation instead of failing") {
    const auto c = ctrl(20.0, 100);
    const auto t = integrate(StsState::vacuum(), PumpConfig{1.2}, c);
    OracleComparisonOptions opts;
    opts.initial_dim = 8;
    opts.evolver.max_dim = 32;
    const auto r = compare_trajectories(t, 1.2, c, opts);
    CHECK(r.truncation_note.has_value());
    CHECK(r.usable_tau_end < 20.0);
    CHECK(r.usable_tau_end > 0.0);
}
