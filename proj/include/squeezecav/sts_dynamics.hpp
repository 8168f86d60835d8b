#pragma once

#include "squeezecav/core_model.hpp"

#include <complex>

namespace squeezecav {

struct IntegrationControl {
    double dtau = 1e-3;
    double tau_end = 0.0;
    int sample_every = 1;
    bool richardson_check = false;

    /// Throws Domain unless dtau > 0, tau_end >= 0 and sample_every >= 1.
    void validate() const;
};

struct StsDerivative {
    double du_dtau = 0.0;
    double dphi_dtau = 0.0;
    double dnth_dtau = 0.0;
};

struct ResonantRates {
    double du_dtau = 0.0;
    double dnth_dtau = 0.0;
};

inline constexpr double kSingularityGuard = 1e-10;
// exp(2u) overflows double shortly after this.
inline constexpr double kMaxAmplitude = 300.0;

/// On-resonance equations of motion:
///   du/dtau   = g/2 - cosh(u) sinh(u) / (2 n_th + 1)
///   dn_th/dtau = sinh^2(u) - n_th
ResonantRates rhs_resonant(double u, double n_th, double g);

/// True when Re(drive * exp(-i phi)) vanishes (relative tolerance 1e-12), which
/// keeps the phase equation finite at sinh(u) = 0.
bool check_resonance_condition(std::complex<double> drive_value, double phi);

/// General equations of motion for an arbitrary complex drive gamma*alpha/(hbar*Gamma):
///   du/dtau   = -2 Im(D e^{-i phi}) - c s / (2 n_th + 1)
///   dphi/dtau = -2 omega/Gamma + 2 (c^2 + s^2) / (c s) Re(D e^{-i phi})
///   dn_th/dtau = s^2 - n_th
/// Throws SingularPhase when |sinh u| <= eps and the resonance condition fails.
StsDerivative rhs_general(const StsState &state, std::complex<double> drive,
                          double omega_over_gamma, double eps = kSingularityGuard);

/// Fixed-step RK4 integration of the STS parameters from `initial`.
/// Without a drive the resonant pair is integrated and phi stays at pump.phi0.
/// Samples every `ctrl.sample_every` steps plus the terminal point.
Trajectory integrate(const StsState &initial, const PumpConfig &pump, const IntegrationControl &ctrl);

/// A single RK4 step of length h from (tau, state). Exposed for root refinement.
StsState advance(const StsState &state, const PumpConfig &pump, double tau, double h);

} // namespace squeezecav
