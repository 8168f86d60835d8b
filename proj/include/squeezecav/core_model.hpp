#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

namespace squeezecav {

// Quadratures are normalized as X = b + b^dag, Y = -i(b - b^dag), i.e. [X, Y] = 2i.
// Vacuum therefore has dX = dY = 1 and the uncertainty floor is dX*dY >= 1.
// Time is dimensionless throughout: tau = Gamma * t.

/// Squeezed thermal state S(xi) rho_T(n_th) S^dag with xi = u * exp(i phi).
struct StsState {
    double u = 0.0;    // squeezing amplitude, >= 0
    double phi = 0.0;  // squeezing phase [rad]
    double n_th = 0.0; // thermal occupation of the core, >= 0

    static StsState vacuum(double phi = 0.0) { return {0.0, phi, 0.0}; }

    std::complex<double> xi() const { return std::polar(u, phi); }

    bool operator==(const StsState &) const = default;
};

/// Complex drive gamma*alpha(tau) / (hbar*Gamma) for the general (non-resonant) equations.
using DriveFunction = std::function<std::complex<double>(double tau)>;

struct PumpConfig {
    double g = 0.0;    // pump-to-loss ratio, >= 0
    double phi0 = 0.0; // squeezing phase locked by the pump
    // When set, the general equations of motion are integrated instead of the
    // reduced resonant pair; omega_over_gamma then enters the phase equation.
    DriveFunction drive = {};
    double omega_over_gamma = 0.0;
};

struct ObservableSet {
    double dx = 1.0;
    double dy = 1.0;
    double product = 1.0;
    double n_mean = 0.0;
    std::optional<double> g2; // absent when <n> = 0
};

struct Trajectory {
    std::vector<double> tau;
    std::vector<StsState> states;
    std::vector<ObservableSet> observables;
    // Max change of any sampled observable when the step is halved; filled
    // only when the step-halving check was requested.
    std::optional<double> step_halving_deviation;

    std::size_t size() const { return tau.size(); }
};

struct QuadratureVariances {
    double x; // <(dX)^2>
    double y; // <(dY)^2>
};

/// Bose occupation 1/(exp(beta*hbar*omega) - 1). Throws Domain for beta_hw <= 0.
double nth_from_beta(double beta_hw);

/// Inverse of nth_from_beta. Throws Domain for n_th at or below kVacuumNth,
/// where the effective temperature is zero and beta is not finite.
double beta_from_nth(double n_th);

inline constexpr double kVacuumNth = 1e-14;

QuadratureVariances quadrature_variances(const StsState &state);

/// n_th cosh(2u) + sinh^2(u)
double mean_photon(const StsState &state);

/// sinh^2(u): photon number of the pure squeezed vacuum with the same amplitude.
double svs_photon(double u);

/// Second-order correlation of an STS. Throws UndefinedCorrelation when <n> = 0.
double g2(const StsState &state);

/// dX * dY = 2 n_th + 1.
double uncertainty_product(const StsState &state);

ObservableSet observables(const StsState &state);

} // namespace squeezecav
