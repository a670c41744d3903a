#pragma once

#include <vector>

namespace clmcomm {

/// Rest-to-rest move with bounded velocity, acceleration and jerk, followed by a dwell.
struct TrajectorySpec {
    double start = 0.0;   ///< [m]
    double end = 0.0;     ///< [m]
    double v_max = 0.1;   ///< [m/s]
    double a_max = 1.0;   ///< [m/s^2]
    double j_max = 1000;  ///< [m/s^3]
    double dwell = 0.0;   ///< rest at the end [s]

    void validate() const;
};

/// Sampled reference: position, velocity, acceleration at t = k / f_s.
struct ReferenceSamples {
    std::vector<double> position;
    std::vector<double> velocity;
    std::vector<double> acceleration;

    std::size_t size() const { return position.size(); }
    void append(const ReferenceSamples& other);
};

/// Segment timing of the seven-segment (jerk-limited) profile.
struct SCurveTiming {
    double jerk_time = 0.0;    ///< duration of each constant-jerk segment
    double accel_time = 0.0;   ///< constant-acceleration duration
    double cruise_time = 0.0;  ///< constant-velocity duration
    double peak_velocity = 0.0;
    double peak_acceleration = 0.0;

    double move_time() const { return 4.0 * jerk_time + 2.0 * accel_time + cruise_time; }
};

/// With `sample_period` > 0 and room to cruise, the jerk and acceleration phases are
/// stretched to whole samples at unchanged peak velocity, so that the acceleration of
/// the sampled reference is linear between samples up to the cruise.
SCurveTiming plan_scurve(double distance, double v_max, double a_max, double j_max, double sample_period = 0.0);

/// Samples the move plus its dwell. The last move sample is placed exactly at `end`.
ReferenceSamples third_order_trajectory(const TrajectorySpec& spec, double sample_rate);

/// Concatenation of several moves.
ReferenceSamples build_reference(const std::vector<TrajectorySpec>& moves, double sample_rate);

}  // namespace clmcomm
