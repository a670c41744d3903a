#include "clmcomm/mechanics.hpp"

#include "clmcomm/types.hpp"

#include <sstream>

namespace clmcomm {

void MechConfig::validate() const {
    if (!(mass > 0.0)) throw ValidationError("mechanics: mass must be > 0");
    if (!(sample_rate > 0.0)) throw ValidationError("mechanics: sample_rate must be > 0");
    if (!(viscous >= 0.0) || !(coulomb >= 0.0)) throw ValidationError("mechanics: friction must be >= 0");
}

double friction_sign(double velocity) {
    if (velocity > kRestVelocity) return 1.0;
    if (velocity < -kRestVelocity) return -1.0;
    return 0.0;
}

MechState step_mechanics(const MechState& state, double force, const MechConfig& cfg) {
    if (!std::isfinite(force)) {
        std::ostringstream msg;
        msg << "mechanics: non-finite force at y = " << state.y;
        throw NumericalError(msg.str());
    }
    double direction = friction_sign(state.ydot);
    if (direction == 0.0) {
        if (std::abs(force) <= cfg.coulomb) return {state.y, 0.0};
        direction = force > 0.0 ? 1.0 : -1.0;
    }
    const double dt = 1.0 / cfg.sample_rate;
    auto accel = [&](double v) { return (force - cfg.viscous * v - cfg.coulomb * direction) / cfg.mass; };

    const double k1y = state.ydot;
    const double k1v = accel(state.ydot);
    const double k2y = state.ydot + 0.5 * dt * k1v;
    const double k2v = accel(k2y);
    const double k3y = state.ydot + 0.5 * dt * k2v;
    const double k3v = accel(k3y);
    const double k4y = state.ydot + dt * k3v;
    const double k4v = accel(k4y);

    MechState next{state.y + dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
                   state.ydot + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)};
    if (cfg.coulomb > 0.0 && next.ydot * direction < 0.0) next.ydot = 0.0;  // friction cannot reverse motion
    return next;
}

std::vector<double> feedforward(const ReferenceSamples& ref, const FeedforwardParams& ff) {
    const std::size_t n = ref.size();
    std::vector<double> u(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t next = k + 1 < n ? k + 1 : k;
        const double acc = 0.5 * (ref.acceleration[next] + ref.acceleration[k]);
        const double vel = 0.5 * (ref.velocity[next] + ref.velocity[k]);
        const double sgn = 0.5 * (friction_sign(ref.velocity[next]) + friction_sign(ref.velocity[k]));
        u[k] = ff.mass * acc + ff.viscous * vel + ff.coulomb * sgn;
    }
    return u;
}

FeedforwardParams identify_feedforward_params(const ReferenceSamples& ref, std::span<const double> commanded_force) {
    const std::size_t n = ref.size();
    if (n == 0 || commanded_force.size() != n) {
        throw ValidationError("feedforward identification: reference and force lengths differ or are empty");
    }
    const auto rows = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd design(rows, 3);
    for (const int col : {0, 1, 2}) {
        FeedforwardParams unit{col == 0 ? 1.0 : 0.0, col == 1 ? 1.0 : 0.0, col == 2 ? 1.0 : 0.0};
        const auto column = feedforward(ref, unit);
        design.col(col) = Eigen::Map<const Eigen::VectorXd>(column.data(), rows);
    }
    const Eigen::VectorXd target = Eigen::Map<const Eigen::VectorXd>(commanded_force.data(), rows);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-9);
    if (qr.rank() < 3) {
        throw NumericalError("feedforward identification: regressor rank deficient (need acceleration, velocity "
                             "and direction excitation)");
    }
    const Eigen::Vector3d p = qr.solve(target);
    return {p(0), p(1), p(2)};
}

void PidGains::validate() const {
    if (kp < 0.0 || ki < 0.0 || kd < 0.0) throw ValidationError("pid: gains must be >= 0");
    if (!(derivative_cutoff > 0.0)) throw ValidationError("pid: derivative cutoff must be > 0");
    if (!(integrator_limit >= 0.0)) throw ValidationError("pid: integrator limit must be >= 0");
}

PidGains PidGains::tuned_for_mass(double mass, double bandwidth) {
    // Lead zero at bandwidth/3, integrator zero at bandwidth/10, |C P| = 1 at the crossover.
    const double wc = kTwoPi * bandwidth;
    PidGains g;
    g.kp = mass * wc * wc / std::sqrt(10.0);
    g.kd = 3.0 * g.kp / wc;
    g.ki = g.kp * wc / 10.0;
    g.derivative_cutoff = 5.0 * bandwidth;
    g.integrator_limit = 50.0;
    return g;
}

PidController::PidController(PidGains gains, double sample_rate)
    : gains_(gains), dt_(1.0 / sample_rate), alpha_(std::exp(-kTwoPi * gains.derivative_cutoff / sample_rate)) {
    gains_.validate();
}

double PidController::update(double error) {
    if (!first_) {
        const double raw = (error - previous_error_) / dt_;
        derivative_ = alpha_ * derivative_ + (1.0 - alpha_) * raw;
    }
    first_ = false;
    previous_error_ = error;
    integral_ = std::clamp(integral_ + gains_.ki * error * dt_, -gains_.integrator_limit, gains_.integrator_limit);
    return gains_.kp * error + integral_ + gains_.kd * derivative_;
}

void PidController::reset() {
    integral_ = 0.0;
    derivative_ = 0.0;
    previous_error_ = 0.0;
    first_ = true;
}

}  // namespace clmcomm
