#include "clmcomm/motor_plant.hpp"

#include <string>

namespace clmcomm {

CurrentPair reduce_star(const CurrentTriple& t) {
    if (std::abs(t.star_sum()) > 1e-9) {
        throw ValidationError("star configuration violated: i_a + i_b + i_c = " + std::to_string(t.star_sum()));
    }
    return {t.a, t.b};
}

double current_norm(const std::vector<CurrentTriple>& currents) {
    double sq = 0.0;
    for (const auto& c : currents) sq += c.a * c.a + c.b * c.b + c.c * c.c;
    return std::sqrt(sq);
}

void MotorGeometry::validate() const {
    if (coil_count < 1) throw ValidationError("geometry: coil_count must be >= 1");
    if (!(pole_pitch > 0.0)) throw ValidationError("geometry: pole_pitch must be > 0");
    if (static_cast<int>(lever_arm.size()) != coil_count) {
        throw ValidationError("geometry: lever_arm needs one entry per coil set");
    }
}

double evaluate_series(const HarmonicSeries& series, double y, double pole_pitch) {
    double sum = 0.0;
    for (const auto& term : series) {
        sum += term.amplitude * std::sin(kTwoPi * term.order * y / pole_pitch + term.phase);
    }
    return sum;
}

namespace {

void validate_series(const HarmonicSeries& series, bool fraction, const char* what) {
    for (const auto& term : series) {
        if (term.order < 1) throw ValidationError(std::string(what) + ": harmonic order must be >= 1");
        if (fraction && term.amplitude < 0.0) {
            throw ValidationError(std::string(what) + ": amplitude fraction must be >= 0");
        }
        if (!std::isfinite(term.amplitude) || !std::isfinite(term.phase)) {
            throw ValidationError(std::string(what) + ": non-finite term");
        }
    }
}

}  // namespace

void ParasiticProfile::validate(int coil_count) const {
    if (!gain_harmonics.empty() && static_cast<int>(gain_harmonics.size()) != coil_count) {
        throw ValidationError("parasitics: gain_harmonics needs one entry per coil set");
    }
    for (const auto& per_axis : gain_harmonics) {
        for (const auto& s : per_axis) validate_series(s, true, "gain ripple");
    }
    for (const auto& s : cogging) validate_series(s, false, "cogging");
    for (double s : noise_std) {
        if (!(s >= 0.0)) throw ValidationError("parasitics: noise_std must be >= 0");
    }
}

void MotorTruth::validate() const {
    geometry.validate();
    if (static_cast<int>(coils.size()) != geometry.coil_count) {
        throw ValidationError("motor: one coil truth per coil set required");
    }
    for (const auto& c : coils) {
        if (!(c.k > 0.0)) throw ValidationError("motor: motor constant k must be > 0");
    }
    parasitics.validate(geometry.coil_count);
}

Eigen::Matrix3d ideal_gain_matrix(double y, int coil, const MotorGeometry& geom, const CoilSetTruth& truth) {
    const double eta = geom.electrical_angle(y) + truth.zeta;
    const double gain = 2.0 / 3.0 * truth.k;
    const double d = geom.lever_arm.at(static_cast<std::size_t>(coil));
    Eigen::Matrix3d k;
    for (int p = 0; p < 3; ++p) {
        const double phase = eta + (p == 0 ? 0.0 : (p == 1 ? kPhaseStep : -kPhaseStep));
        k(0, p) = gain * std::sin(phase);
        k(1, p) = gain * geom.mu * std::cos(phase);
        k(2, p) = d * k(1, p);
    }
    return k;
}

Eigen::Matrix3d plant_gain_matrix(double y, int coil, const MotorTruth& truth) {
    Eigen::Matrix3d k = ideal_gain_matrix(y, coil, truth.geometry, truth.coils.at(static_cast<std::size_t>(coil)));
    const auto& ripple = truth.parasitics.gain_harmonics;
    if (!ripple.empty()) {
        const auto& per_axis = ripple[static_cast<std::size_t>(coil)];
        for (int q = 0; q < 3; ++q) {
            k.row(q) *= 1.0 + evaluate_series(per_axis[static_cast<std::size_t>(q)], y, truth.geometry.pole_pitch);
        }
    }
    return k;
}

ForceVector cogging_truth(double y, const ParasiticProfile& profile, double pole_pitch) {
    return {evaluate_series(profile.cogging[0], y, pole_pitch), evaluate_series(profile.cogging[1], y, pole_pitch),
            evaluate_series(profile.cogging[2], y, pole_pitch)};
}

MeasurementNoise::MeasurementNoise(std::array<double, 3> std_dev, std::uint64_t seed)
    : std_dev_(std_dev), engine_(seed) {}

ForceVector MeasurementNoise::sample() {
    ForceVector n;
    for (int q = 0; q < 3; ++q) n[q] = std_dev_[static_cast<std::size_t>(q)] * unit_(engine_);
    return n;
}

ForceVector plant_force(const std::vector<CurrentTriple>& currents, double y, const MotorTruth& truth,
                        MeasurementNoise* noise) {
    if (static_cast<int>(currents.size()) != truth.geometry.coil_count) {
        throw ValidationError("plant_force: one current triple per coil set required");
    }
    Eigen::Vector3d f = Eigen::Vector3d::Zero();
    for (int l = 0; l < truth.geometry.coil_count; ++l) {
        const auto& i = currents[static_cast<std::size_t>(l)];
        if (i.a == 0.0 && i.b == 0.0 && i.c == 0.0) continue;
        f += plant_gain_matrix(y, l, truth) * i.vec();
    }
    ForceVector out = ForceVector::from(f) + cogging_truth(y, truth.parasitics, truth.geometry.pole_pitch);
    if (noise != nullptr) out = out + noise->sample();
    return out;
}

}  // namespace clmcomm
