#include "squeezecav/core_model.hpp"

#include "squeezecav/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <string>

namespace squeezecav {

const char *to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::UndefinedCorrelation: return "undefined-correlation";
    case ErrorKind::SingularPhase: return "singular-phase";
    case ErrorKind::IntegrationOverflow: return "integration-overflow";
    case ErrorKind::NoSteadyState: return "no-steady-state";
    case ErrorKind::NotReached: return "not-reached";
    case ErrorKind::Truncation: return "truncation";
    case ErrorKind::Invariant: return "invariant";
    case ErrorKind::Size: return "size";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
    }
    return "unknown";
}

double nth_from_beta(double beta_hw) {
    if (!(beta_hw > 0.0))
        throw Error(ErrorKind::Domain, "beta*hbar*omega must be > 0, got " + fmt::format("{:.6g}", beta_hw));
    return 1.0 / std::expm1(beta_hw);
}

double beta_from_nth(double n_th) {
    if (!(n_th > kVacuumNth))
        throw Error(ErrorKind::Domain, "beta is not finite for n_th = " + fmt::format("{:.6g}", n_th));
    return std::log1p(1.0 / n_th);
}

QuadratureVariances quadrature_variances(const StsState &state) {
    const double core = 2.0 * state.n_th + 1.0;
    return {core * std::exp(-2.0 * state.u), core * std::exp(2.0 * state.u)};
}

double svs_photon(double u) {
    const double s = std::sinh(u);
    return s * s;
}

double mean_photon(const StsState &state) {
    return state.n_th * std::cosh(2.0 * state.u) + svs_photon(state.u);
}

double g2(const StsState &state) {
    const double n = mean_photon(state);
    if (!(n > 0.0))
        throw Error(ErrorKind::UndefinedCorrelation, "g2 is 0/0 for a state with <n> = 0");
    const double half = state.n_th + 0.5;
    const double s2u = std::sinh(2.0 * state.u);
    return 2.0 + (half * half * s2u * s2u) / (n * n);
}

double uncertainty_product(const StsState &state) { return 2.0 * state.n_th + 1.0; }

ObservableSet observables(const StsState &state) {
    const auto var = quadrature_variances(state);
    ObservableSet obs;
    obs.dx = std::sqrt(var.x);
    obs.dy = std::sqrt(var.y);
    obs.product = uncertainty_product(state);
    obs.n_mean = mean_photon(state);
    if (obs.n_mean > 0.0)
        obs.g2 = g2(state);
    return obs;
}

} // namespace squeezecav
