#include "polecart/env/cartpole.hpp"

#include <cmath>
#include <stdexcept>

namespace polecart::env {

FullState reset(Rng& rng) {
    FullState s;
    s.x = rng.uniform(-kInitRange, kInitRange);
    s.x_dot = rng.uniform(-kInitRange, kInitRange);
    s.theta = rng.uniform(-kInitRange, kInitRange);
    s.theta_dot = rng.uniform(-kInitRange, kInitRange);
    return s;
}

StepOutcome step(const FullState& state, Action action) {
    if (!std::isfinite(state.x) || !std::isfinite(state.x_dot) ||
        !std::isfinite(state.theta) || !std::isfinite(state.theta_dot)) {
        throw std::domain_error("cartpole step: state is not finite");
    }

    const double force =
        action == Action::Right ? kForceMagnitude : -kForceMagnitude;
    const double cos_theta = std::cos(state.theta);
    const double sin_theta = std::sin(state.theta);

    const double temp =
        (force + kPoleMassLength * state.theta_dot * state.theta_dot * sin_theta) /
        kTotalMass;
    const double theta_acc =
        (kGravity * sin_theta - cos_theta * temp) /
        (kPoleHalfLength *
         (4.0 / 3.0 - kPoleMass * cos_theta * cos_theta / kTotalMass));
    const double x_acc =
        temp - kPoleMassLength * theta_acc * cos_theta / kTotalMass;

    // Explicit Euler: positions advance on the old velocities.
    StepOutcome out;
    out.next_state.x = state.x + kTimeStep * state.x_dot;
    out.next_state.x_dot = state.x_dot + kTimeStep * x_acc;
    out.next_state.theta = state.theta + kTimeStep * state.theta_dot;
    out.next_state.theta_dot = state.theta_dot + kTimeStep * theta_acc;

    out.terminal = std::abs(out.next_state.theta) > kThetaThreshold ||
                   std::abs(out.next_state.x) > kXThreshold;
    out.reward = out.terminal ? -1.0 : 1.0;
    return out;
}

PartialObservation observe_partial(const FullState& state) {
    return {state.x, state.theta};
}

}  // namespace polecart::env
