#include "squeezecav/steady_state.hpp"

#include "squeezecav/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <string>

namespace squeezecav {

namespace {

void require_sub_threshold(double g) {
    if (!(g >= 0.0))
        throw Error(ErrorKind::Domain, "pump ratio g must be >= 0, got " + fmt::format("{:.6g}", g));
    if (g >= 1.0)
        throw Error(ErrorKind::NoSteadyState,
                    "no steady state for g = " + fmt::format("{:.6g}", g) + " (requires g < 1)");
}

} // namespace

double steady_nth(double g) {
    require_sub_threshold(g);
    const double root = std::sqrt((1.0 - g) * (1.0 + g));
    // 1 - sqrt(1-g^2) rewritten as g^2 / (1 + sqrt(1-g^2)) to avoid cancellation at small g.
    return g * g / ((1.0 + root) * 2.0 * root);
}

double steady_mean_photon(double g) {
    require_sub_threshold(g);
    return g * g / (2.0 * (1.0 - g) * (1.0 + g));
}

SteadyStateResult steady_state(double g) {
    require_sub_threshold(g);
    SteadyStateResult r;
    r.u_ss = 0.5 * std::atanh(g);
    r.n_th_ss = steady_nth(g);
    r.n_mean_ss = steady_mean_photon(g);
    const auto limits = quad_limits(g);
    r.dx_ss = limits.dx_ss;
    r.dy_ss = *limits.dy_ss;
    r.product_ss = *limits.product_ss;
    if (g > 0.0)
        r.g2_ss = g2_ss(g);
    return r;
}

QuadratureLimits quad_limits(double g) {
    if (!(g >= 0.0) || !std::isfinite(g))
        throw Error(ErrorKind::Domain, "pump ratio g must be finite and >= 0");
    QuadratureLimits q{1.0 / std::sqrt(1.0 + g), std::nullopt, std::nullopt};
    if (g < 1.0) {
        q.dy_ss = 1.0 / std::sqrt(1.0 - g);
        q.product_ss = 1.0 / std::sqrt((1.0 - g) * (1.0 + g));
    }
    return q;
}

double g2_ss(double g) {
    if (!(g > 0.0))
        throw Error(ErrorKind::UndefinedCorrelation, "steady-state g2 undefined at g <= 0 (no photons)");
    const double n = steady_nth(g);
    const double half = n + 0.5;
    const double pair = n * n + n;
    const double denom = 2.0 * n / g * std::sqrt(pair) + n;
    return 2.0 + 4.0 * half * half * pair / (denom * denom);
}

double svs_g2(double n_mean) {
    if (!(n_mean > 0.0))
        throw Error(ErrorKind::UndefinedCorrelation, "squeezed-vacuum g2 undefined for <n> <= 0");
    return 3.0 + 1.0 / n_mean;
}

ThresholdResult find_threshold(double g, double delta, const IntegrationControl &ctrl) {
    ctrl.validate();
    if (!(g > 0.0) || !std::isfinite(g))
        throw Error(ErrorKind::Domain, "threshold search needs a finite g > 0");
    if (!(delta > 0.0) || !std::isfinite(delta))
        throw Error(ErrorKind::Domain, "threshold search needs a finite delta > 0");

    const PumpConfig pump{g};
    ThresholdResult result;
    result.delta = delta;
    result.target_dx = (1.0 + delta) * quad_limits(g).dx_ss;

    StsState state = StsState::vacuum();
    ObservableSet obs = observables(state);
    if (obs.dx <= result.target_dx) {
        result.state_at_threshold = state;
        result.observables_at_threshold = obs;
        return result;
    }

    const long steps = static_cast<long>(std::ceil(ctrl.tau_end / ctrl.dtau - 1e-9));
    double tau = 0.0;
    for (long k = 1; k <= steps; ++k) {
        const double h = std::min(ctrl.dtau, ctrl.tau_end - tau);
        const StsState next = advance(state, pump, tau, h);
        const ObservableSet next_obs = observables(next);
        if (!std::isfinite(next_obs.dx) || !std::isfinite(next.n_th) || next.u > kMaxAmplitude)
            throw Error(ErrorKind::IntegrationOverflow,
                        "state overflowed before the threshold at tau = " + fmt::format("{:.6g}", tau), tau);

        if (next_obs.dx <= result.target_dx) {
            // Root lies in (tau, tau + h]; bisect on the partial step length.
            double lo = 0.0;
            double hi = h;
            StsState best = next;
            ObservableSet best_obs = next_obs;
            double best_h = h;
            for (int iter = 0; iter < 200; ++iter) {
                if (std::abs(best_obs.dx - result.target_dx) < 1e-9)
                    break;
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi)
                    break;
                const StsState trial = advance(state, pump, tau, mid);
                const ObservableSet trial_obs = observables(trial);
                best = trial;
                best_obs = trial_obs;
                best_h = mid;
                if (trial_obs.dx > result.target_dx)
                    lo = mid;
                else
                    hi = mid;
            }
            result.tau_star = tau + best_h;
            result.state_at_threshold = best;
            result.observables_at_threshold = best_obs;
            return result;
        }
        state = next;
        obs = next_obs;
        tau = (k == steps) ? ctrl.tau_end : static_cast<double>(k) * ctrl.dtau;
    }
    throw Error(ErrorKind::NotReached,
                "dX did not reach " + fmt::format("{:.6g}", result.target_dx) + " before tau = " +
                    fmt::format("{:.6g}", ctrl.tau_end) + " (last dX = " + fmt::format("{:.6g}", obs.dx) + ")",
                ctrl.tau_end, obs.dx);
}

} // namespace squeezecav
