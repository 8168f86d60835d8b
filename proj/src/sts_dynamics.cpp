#include "squeezecav/sts_dynamics.hpp"

#include "squeezecav/errors.hpp"
#include "squeezecav/rk4.hpp"

#include <fmt/format.h>

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace squeezecav {

namespace {

using Vec3 = Eigen::Vector3d; // (u, phi, n_th)

Vec3 to_vec(const StsState &s) { return {s.u, s.phi, s.n_th}; }
StsState from_vec(const Vec3 &v) { return {v[0], v[1], v[2]}; }

Vec3 rates(const StsState &s, const PumpConfig &pump, double tau) {
    if (pump.drive) {
        const auto d = rhs_general(s, pump.drive(tau), pump.omega_over_gamma);
        return {d.du_dtau, d.dphi_dtau, d.dnth_dtau};
    }
    const auto r = rhs_resonant(s.u, s.n_th, pump.g);
    return {r.du_dtau, 0.0, r.dnth_dtau};
}

// Step count and size of the (possibly shorter) final step.
struct StepPlan {
    long full_steps;
    double last_step;
};

StepPlan plan_steps(double dtau, double tau_end) {
    const double ratio = tau_end / dtau;
    long n = static_cast<long>(std::floor(ratio + 1e-9));
    double rest = tau_end - static_cast<double>(n) * dtau;
    if (rest < 1e-9 * dtau)
        rest = 0.0;
    return {n, rest};
}

void check_finite(const StsState &s, const ObservableSet &obs, double tau) {
    const bool finite = std::isfinite(s.u) && std::isfinite(s.phi) && std::isfinite(s.n_th) &&
                        std::isfinite(obs.dx) && std::isfinite(obs.dy) && std::isfinite(obs.n_mean);
    if (!finite || s.u > kMaxAmplitude)
        throw Error(ErrorKind::IntegrationOverflow,
                    "state overflowed double range at tau = " + fmt::format("{:.6g}", tau), tau, s.u);
}

double observable_deviation(const ObservableSet &a, const ObservableSet &b) {
    // Absolute for O(1) quantities, relative once a value exceeds one; g2 grows
    // like 1/u^2 right after the pump is switched on.
    auto dev = [](double x, double y) { return std::abs(x - y) / std::max(1.0, std::abs(x)); };
    double m = std::max({dev(a.dx, b.dx), dev(a.dy, b.dy), dev(a.product, b.product), dev(a.n_mean, b.n_mean)});
    if (a.g2 && b.g2)
        m = std::max(m, dev(*a.g2, *b.g2));
    return m;
}

Trajectory integrate_once(const StsState &initial, const PumpConfig &pump, const IntegrationControl &ctrl) {
    const auto plan = plan_steps(ctrl.dtau, ctrl.tau_end);
    Trajectory traj;
    const std::size_t expected = static_cast<std::size_t>(plan.full_steps / ctrl.sample_every) + 2;
    traj.tau.reserve(expected);
    traj.states.reserve(expected);
    traj.observables.reserve(expected);

    auto record = [&](double tau, const StsState &s) {
        auto obs = observables(s);
        check_finite(s, obs, tau);
        traj.tau.push_back(tau);
        traj.states.push_back(s);
        traj.observables.push_back(std::move(obs));
    };

    record(0.0, initial);
    StsState state = initial;
    if (!pump.drive && state.u == 0.0)
        state.phi = pump.phi0;

    double tau = 0.0;
    for (long k = 1; k <= plan.full_steps; ++k) {
        state = advance(state, pump, tau, ctrl.dtau);
        tau = static_cast<double>(k) * ctrl.dtau;
        if (k == plan.full_steps && plan.last_step == 0.0)
            tau = ctrl.tau_end;
        if (k % ctrl.sample_every == 0 || (k == plan.full_steps && plan.last_step == 0.0)) {
            record(tau, state);
        } else {
            check_finite(state, observables(state), tau);
        }
    }
    if (plan.last_step > 0.0) {
        state = advance(state, pump, tau, plan.last_step);
        record(ctrl.tau_end, state);
    }
    return traj;
}

} // namespace

void IntegrationControl::validate() const {
    if (!(dtau > 0.0) || !std::isfinite(dtau))
        throw Error(ErrorKind::Domain, "dtau must be a positive finite number");
    if (!(tau_end >= 0.0) || !std::isfinite(tau_end))
        throw Error(ErrorKind::Domain, "tau_end must be a finite number >= 0");
    if (sample_every < 1)
        throw Error(ErrorKind::Domain, "sample_every must be >= 1");
}

ResonantRates rhs_resonant(double u, double n_th, double g) {
    const double c = std::cosh(u);
    const double s = std::sinh(u);
    return {0.5 * g - c * s / (2.0 * n_th + 1.0), s * s - n_th};
}

bool check_resonance_condition(std::complex<double> drive_value, double phi) {
    if (drive_value == 0.0)
        return true;
    const auto rotated = drive_value * std::polar(1.0, -phi);
    return std::abs(rotated.real()) <= 1e-12 * std::abs(drive_value);
}

StsDerivative rhs_general(const StsState &state, std::complex<double> drive, double omega_over_gamma,
                          double eps) {
    const double c = std::cosh(state.u);
    const double s = std::sinh(state.u);
    const auto rotated = drive * std::polar(1.0, -state.phi);

    StsDerivative d;
    d.du_dtau = -2.0 * rotated.imag() - c * s / (2.0 * state.n_th + 1.0);
    d.dnth_dtau = s * s - state.n_th;
    d.dphi_dtau = -2.0 * omega_over_gamma;
    if (std::abs(s) > eps) {
        d.dphi_dtau += 2.0 * (c * c + s * s) / (c * s) * rotated.real();
    } else if (!check_resonance_condition(drive, state.phi)) {
        throw Error(ErrorKind::SingularPhase,
                    "phase equation diverges: sinh(u) ~ 0 and the drive is not in quadrature with the phase");
    }
    return d;
}

StsState advance(const StsState &state, const PumpConfig &pump, double tau, double h) {
    auto rhs = [&](double t, const Vec3 &y) { return rates(from_vec(y), pump, t); };
    StsState next = from_vec(rk4_step(rhs, tau, to_vec(state), h));
    if (!pump.drive)
        next.phi = state.phi;
    return next;
}

Trajectory integrate(const StsState &initial, const PumpConfig &pump, const IntegrationControl &ctrl) {
    ctrl.validate();
    if (!(pump.g >= 0.0) || !std::isfinite(pump.g))
        throw Error(ErrorKind::Domain, "pump ratio g must be finite and >= 0");
    if (!(initial.u >= 0.0) || !(initial.n_th >= 0.0) || !std::isfinite(initial.u) ||
        !std::isfinite(initial.n_th) || !std::isfinite(initial.phi))
        throw Error(ErrorKind::Domain, "initial state needs finite u >= 0 and n_th >= 0");
    if (!pump.drive && initial.u > 0.0) {
        const double offset = std::remainder(initial.phi - pump.phi0, 2.0 * std::numbers::pi);
        if (std::abs(offset) > 1e-12)
            throw Error(ErrorKind::Domain,
                        "resonant pumping needs the initial squeezing phase to equal the pump phase phi0");
    }

    Trajectory traj = integrate_once(initial, pump, ctrl);
    if (ctrl.richardson_check) {
        IntegrationControl fine = ctrl;
        fine.dtau = 0.5 * ctrl.dtau;
        fine.sample_every = 2 * ctrl.sample_every;
        fine.richardson_check = false;
        const Trajectory half = integrate_once(initial, pump, fine);
        double worst = 0.0;
        std::size_t j = 0;
        for (std::size_t i = 0; i < traj.size(); ++i) {
            while (j < half.size() && half.tau[j] < traj.tau[i] - 1e-12)
                ++j;
            if (j < half.size() && std::abs(half.tau[j] - traj.tau[i]) <= 1e-12)
                worst = std::max(worst, observable_deviation(traj.observables[i], half.observables[j]));
        }
        traj.step_halving_deviation = worst;
    }
    return traj;
}

} // namespace squeezecav
