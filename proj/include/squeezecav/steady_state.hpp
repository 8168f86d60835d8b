#pragma once

#include "squeezecav/core_model.hpp"
#include "squeezecav/sts_dynamics.hpp"

#include <optional>

namespace squeezecav {

struct SteadyStateResult {
    double u_ss = 0.0;
    double n_th_ss = 0.0;
    double n_mean_ss = 0.0;
    double dx_ss = 1.0;
    double dy_ss = 1.0;
    double product_ss = 1.0;
    std::optional<double> g2_ss; // absent at g = 0 (no photons)

    StsState state(double phi0 = 0.0) const { return {u_ss, phi0, n_th_ss}; }
};

struct QuadratureLimits {
    double dx_ss;                      // 1/sqrt(1+g); the attractor of dX for any g
    std::optional<double> dy_ss;       // 1/sqrt(1-g), only below threshold
    std::optional<double> product_ss;  // 1/sqrt(1-g^2), only below threshold
};

struct ThresholdResult {
    double tau_star = 0.0;
    StsState state_at_threshold;
    ObservableSet observables_at_threshold;
    double delta = 0.0;
    double target_dx = 0.0;
};

/// Fixed point of the resonant equations for 0 <= g < 1:
/// tanh(2u) = g and sinh^2(u) = n_th. Throws NoSteadyState for g >= 1.
SteadyStateResult steady_state(double g);

/// Closed-form thermal occupation at the fixed point, (1 - sqrt(1-g^2)) / (2 sqrt(1-g^2)).
double steady_nth(double g);

/// Total photon number at the fixed point, g^2 / (2 (1 - g^2)).
double steady_mean_photon(double g);

QuadratureLimits quad_limits(double g);

/// Steady-state g2 expressed through n_th and g:
///   2 + 4 (n+1/2)^2 (n^2+n) / ((2n/g) sqrt(n^2+n) + n)^2   with n = steady_nth(g).
/// Throws UndefinedCorrelation for g <= 0 and NoSteadyState for g >= 1.
double g2_ss(double g);

/// g2 of a squeezed vacuum with mean photon number n_mean: 3 + 1/n_mean.
double svs_g2(double n_mean);

/// First time at which dX of the vacuum-started trajectory falls to
/// (1 + delta)/sqrt(1 + g). Bracketed on the RK4 grid, then refined by
/// bisection with local re-integration until |dX - target| < 1e-9.
/// A target at or above 1 is met immediately (tau* = 0). Throws NotReached
/// when the target is not crossed before ctrl.tau_end.
ThresholdResult find_threshold(double g, double delta, const IntegrationControl &ctrl);

} // namespace squeezecav
