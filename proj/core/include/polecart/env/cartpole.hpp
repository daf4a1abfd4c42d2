#pragma once

#include <numbers>

#include "polecart/rng.hpp"

namespace polecart::env {

/// The four physical variables of the cart-pole system.
struct FullState {
    double x = 0.0;          // cart position, meters
    double x_dot = 0.0;      // cart velocity, m/s
    double theta = 0.0;      // pole angle from vertical, radians
    double theta_dot = 0.0;  // pole tip angular velocity, rad/s

    bool operator==(const FullState&) const = default;
};

/// What the agent is allowed to see: position and angle only.
struct PartialObservation {
    double x = 0.0;
    double theta = 0.0;

    bool operator==(const PartialObservation&) const = default;
};

enum class Action : int { Left = 0, Right = 1 };

inline constexpr int kActionCount = 2;

struct StepOutcome {
    FullState next_state;
    double reward = 0.0;  // +1 while the pole stays up, -1 when it falls
    bool terminal = false;
};

// Classic-control cart-pole constants.
inline constexpr double kGravity = 9.8;
inline constexpr double kCartMass = 1.0;
inline constexpr double kPoleMass = 0.1;
inline constexpr double kTotalMass = kCartMass + kPoleMass;
inline constexpr double kPoleHalfLength = 0.5;
inline constexpr double kPoleMassLength = kPoleMass * kPoleHalfLength;
inline constexpr double kForceMagnitude = 10.0;
inline constexpr double kTimeStep = 0.02;
inline constexpr double kThetaThreshold = 12.0 * std::numbers::pi / 180.0;
inline constexpr double kXThreshold = 2.4;
inline constexpr int kEpisodeCap = 500;
inline constexpr double kInitRange = 0.05;

/// Draws a fresh start state, each field uniform in [-kInitRange, kInitRange].
/// Consumes exactly 4 PRNG draws, in field order x, x_dot, theta, theta_dot.
FullState reset(Rng& rng);

/// Advances the dynamics by one explicit-Euler step of length kTimeStep.
/// Terminal when |theta| or |x| crosses its threshold; reward is +1 on a
/// non-terminal step and -1 on a terminal one. Episode-length accounting
/// (kEpisodeCap) is the caller's job.
/// Throws std::domain_error if the input state is not finite.
StepOutcome step(const FullState& state, Action action);

/// Projection onto the observable pair (x, theta). No noise, no scaling.
PartialObservation observe_partial(const FullState& state);

}  // namespace polecart::env
