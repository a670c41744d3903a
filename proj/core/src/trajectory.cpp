#include "clmcomm/trajectory.hpp"

#include "clmcomm/types.hpp"

#include <array>

namespace clmcomm {

void TrajectorySpec::validate() const {
    if (!std::isfinite(start) || !std::isfinite(end)) throw ValidationError("trajectory: non-finite endpoints");
    if (!(v_max > 0.0) || !(a_max > 0.0) || !(j_max > 0.0)) {
        throw ValidationError("trajectory: v_max, a_max and j_max must be > 0");
    }
    if (!(dwell >= 0.0)) throw ValidationError("trajectory: dwell must be >= 0");
}

void ReferenceSamples::append(const ReferenceSamples& other) {
    position.insert(position.end(), other.position.begin(), other.position.end());
    velocity.insert(velocity.end(), other.velocity.begin(), other.velocity.end());
    acceleration.insert(acceleration.end(), other.acceleration.begin(), other.acceleration.end());
}

SCurveTiming plan_scurve(double distance, double v_max, double a_max, double j_max, double sample_period) {
    SCurveTiming t;
    if (distance <= 0.0) return t;
    const double v_knee = a_max * a_max / j_max;  // lowest peak velocity that reaches a_max

    auto shape_for = [&](double v) {
        SCurveTiming s;
        s.peak_velocity = v;
        if (v >= v_knee) {
            s.jerk_time = a_max / j_max;
            s.accel_time = v / a_max - s.jerk_time;
            s.peak_acceleration = a_max;
        } else {
            s.jerk_time = std::sqrt(v / j_max);
            s.peak_acceleration = j_max * s.jerk_time;
        }
        return s;
    };

    t = shape_for(v_max);
    if (sample_period > 0.0) {
        // Whole-sample jerk and acceleration phases; v_max is kept, jerk and acceleration drop.
        const double tj = std::ceil(t.jerk_time / sample_period - 1e-9) * sample_period;
        const double ta = std::ceil(t.accel_time / sample_period - 1e-9) * sample_period;
        if (distance >= v_max * (2.0 * tj + ta)) {
            t.jerk_time = tj;
            t.accel_time = ta;
            t.peak_acceleration = v_max / (tj + ta);
        }
    }
    const double ramp_distance = v_max * (2.0 * t.jerk_time + t.accel_time);  // accelerate plus decelerate
    if (distance >= ramp_distance) {
        t.cruise_time = (distance - ramp_distance) / v_max;
        return t;
    }
    // Velocity limit not reached: the peak velocity v solves v (2 t_j + t_a) = distance.
    double v = 0.5 * (-v_knee + std::sqrt(v_knee * v_knee + 4.0 * a_max * distance));
    if (v < v_knee) v = std::cbrt(distance * distance * j_max / 4.0);
    return shape_for(v);
}

namespace {

struct KinematicState {
    double p = 0.0;
    double v = 0.0;
    double a = 0.0;
};

KinematicState advance(const KinematicState& s, double jerk, double dt) {
    return {s.p + s.v * dt + 0.5 * s.a * dt * dt + jerk * dt * dt * dt / 6.0, s.v + s.a * dt + 0.5 * jerk * dt * dt,
            s.a + jerk * dt};
}

}  // namespace

ReferenceSamples third_order_trajectory(const TrajectorySpec& spec, double sample_rate) {
    spec.validate();
    if (!(sample_rate > 0.0)) throw ValidationError("trajectory: sample rate must be > 0");
    const double distance = std::abs(spec.end - spec.start);
    const double dir = spec.end >= spec.start ? 1.0 : -1.0;
    const SCurveTiming timing = plan_scurve(distance, spec.v_max, spec.a_max, spec.j_max, 1.0 / sample_rate);
    const double j = timing.jerk_time > 0.0 ? timing.peak_acceleration / timing.jerk_time : 0.0;

    const std::array<double, 7> durations{timing.jerk_time,   timing.accel_time, timing.jerk_time, timing.cruise_time,
                                          timing.jerk_time,   timing.accel_time, timing.jerk_time};
    const std::array<double, 7> jerks{j, 0.0, -j, 0.0, -j, 0.0, j};
    std::array<KinematicState, 8> boundary{};
    for (std::size_t s = 0; s < 7; ++s) boundary[s + 1] = advance(boundary[s], jerks[s], durations[s]);

    const double move_time = timing.move_time();
    // samples strictly before move_time, then the first sample at rest on `end`
    const auto move_samples = static_cast<std::size_t>(std::ceil(move_time * sample_rate - 1e-9)) + 1;
    const auto dwell_samples = static_cast<std::size_t>(std::llround(spec.dwell * sample_rate));

    ReferenceSamples out;
    const std::size_t total = move_samples + dwell_samples;
    out.position.reserve(total);
    out.velocity.reserve(total);
    out.acceleration.reserve(total);
    for (std::size_t k = 0; k < total; ++k) {
        const double t = static_cast<double>(k) / sample_rate;
        KinematicState st{distance, 0.0, 0.0};
        if (t < move_time) {
            double t0 = 0.0;
            std::size_t seg = 0;
            while (seg < 6 && t >= t0 + durations[seg]) t0 += durations[seg++];
            st = advance(boundary[seg], jerks[seg], t - t0);
        }
        out.position.push_back(spec.start + dir * st.p);
        out.velocity.push_back(dir * st.v);
        out.acceleration.push_back(dir * st.a);
    }
    return out;
}

ReferenceSamples build_reference(const std::vector<TrajectorySpec>& moves, double sample_rate) {
    ReferenceSamples ref;
    for (const auto& m : moves) ref.append(third_order_trajectory(m, sample_rate));
    return ref;
}

}  // namespace clmcomm
