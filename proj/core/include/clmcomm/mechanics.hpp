#pragma once

#include "clmcomm/trajectory.hpp"

#include <span>
#include <vector>

namespace clmcomm {

/// Translator moving along y: m y'' = F_y - f_v y' - f_c sign(y').
struct MechConfig {
    double mass = 20.0;          ///< [kg]
    double viscous = 40.0;       ///< f_v [N s/m]
    double coulomb = 8.0;        ///< f_c [N]
    double sample_rate = 1e4;    ///< [Hz]

    void validate() const;
};

struct MechState {
    double y = 0.0;
    double ydot = 0.0;
};

/// Velocities below this magnitude count as rest.
inline constexpr double kRestVelocity = 1e-6;

/// sign() with the rest deadband.
double friction_sign(double velocity);

/// One sample of classical RK4 with the force held constant. Coulomb friction direction is
/// frozen over the step; a step that would reverse the velocity sticks at rest, and a body
/// at rest stays there while |F_y| <= f_c.
MechState step_mechanics(const MechState& state, double force, const MechConfig& cfg);

struct FeedforwardParams {
    double mass = 0.0;
    double viscous = 0.0;
    double coulomb = 0.0;
};

/// u_ff(k) with the half-sample average delta x(k) = (x(k+1) + x(k)) / 2 applied to every
/// term. The last sample reuses its own value as the look-ahead.
std::vector<double> feedforward(const ReferenceSamples& ref, const FeedforwardParams& ff);

/// Least-squares fit of the commanded driving force against the filtered reference
/// acceleration, velocity and velocity sign. Throws NumericalError when a column is not excited.
FeedforwardParams identify_feedforward_params(const ReferenceSamples& ref, std::span<const double> commanded_force);

struct PidGains {
    double kp = 0.0;               ///< [N/m]
    double ki = 0.0;               ///< [N/(m s)]
    double kd = 0.0;               ///< [N s/m]
    double derivative_cutoff = 250.0;  ///< [Hz]
    double integrator_limit = 50.0;    ///< clamp on the integral contribution [N]

    void validate() const;
    /// PID for a pure mass placing the crossover at `bandwidth` Hz.
    static PidGains tuned_for_mass(double mass, double bandwidth);
};

/// Discrete PID on the tracking error with a first-order filtered derivative.
class PidController {
public:
    PidController(PidGains gains, double sample_rate);
    double update(double error);
    void reset();

private:
    PidGains gains_;
    double dt_;
    double alpha_;  // derivative filter coefficient
    double integral_ = 0.0;
    double derivative_ = 0.0;
    double previous_error_ = 0.0;
    bool first_ = true;
};

}  // namespace clmcomm
