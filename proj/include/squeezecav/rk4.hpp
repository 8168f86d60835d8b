#pragma once

namespace squeezecav {

// Classical fixed-step 4th-order Runge-Kutta. `State` needs `+`, `-` and
// scalar `*`; `rhs(tau, state)` returns the derivative as a `State`.
template <typename State, typename Rhs>
State rk4_step(const Rhs &rhs, double tau, const State &y, double h) {
    const double half = 0.5 * h;
    const State k1 = rhs(tau, y);
    const State k2 = rhs(tau + half, State(y + half * k1));
    const State k3 = rhs(tau + half, State(y + half * k2));
    const State k4 = rhs(tau + h, State(y + h * k3));
    return State(y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

} // namespace squeezecav
