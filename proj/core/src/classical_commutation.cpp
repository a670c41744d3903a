#include "clmcomm/classical_commutation.hpp"

#include "clmcomm/allocation.hpp"

#include <string>

namespace clmcomm {

void CommutationParams::validate(int coil_count) const {
    if (static_cast<int>(k_hat.size()) != coil_count || static_cast<int>(zeta_hat.size()) != coil_count) {
        throw ValidationError("commutation params: need one k_hat and zeta_hat per coil set");
    }
    for (double k : k_hat) {
        if (!(k > 0.0)) throw ValidationError("commutation params: k_hat must be > 0");
    }
}

CommutationParams CommutationParams::uniform(int coil_count, double k_hat, double zeta_hat) {
    return {std::vector<double>(static_cast<std::size_t>(coil_count), k_hat),
            std::vector<double>(static_cast<std::size_t>(coil_count), zeta_hat)};
}

CurrentTriple sinusoidal_currents(double force, double k_hat, double eta_hat) {
    const double scale = force / k_hat;
    const double a = std::sin(eta_hat) * scale;
    const double b = std::sin(eta_hat + kPhaseStep) * scale;
    return {a, b, -a - b};
}

std::vector<double> force_shares(const CommutationParams& params, double fy_star) {
    double total = 0.0;
    for (double k : params.k_hat) total += k * k;
    std::vector<double> shares;
    shares.reserve(params.k_hat.size());
    for (double k : params.k_hat) shares.push_back(k * k / total * fy_star);
    return shares;
}

std::vector<CurrentTriple> classical_currents(const ForceVector& f_star, double y, const CommutationParams& params,
                                              const MotorGeometry& geom) {
    if (f_star.fx != 0.0 || f_star.tz != 0.0) {
        throw ValidationError("classical commutation only realises driving forces; use pseudoinverse_commutation");
    }
    const auto shares = force_shares(params, f_star.fy);
    const double angle = geom.electrical_angle(y);
    std::vector<CurrentTriple> out;
    out.reserve(shares.size());
    for (std::size_t l = 0; l < shares.size(); ++l) {
        out.push_back(sinusoidal_currents(shares[l], params.k_hat[l], angle + params.zeta_hat[l]));
    }
    return out;
}

std::vector<CurrentTriple> pseudoinverse_commutation(const ForceVector& f_star, double y,
                                                     const CommutationParams& params, const MotorGeometry& geom) {
    const int coils = params.coil_count();
    StackedGain gain(3, 2 * coils);
    for (int l = 0; l < coils; ++l) {
        const CoilSetTruth estimate{params.k_hat[static_cast<std::size_t>(l)],
                                    params.zeta_hat[static_cast<std::size_t>(l)]};
        gain.block<3, 2>(0, 2 * l) = star_reduce(ideal_gain_matrix(y, l, geom, estimate));
    }
    return min_norm_allocation(gain, f_star.vec(), y);
}

double fit_calibration_coefficient(const DataSetZ& data) {
    if (data.empty()) throw ValidationError("calibration: empty data set");
    double num = 0.0;
    double den = 0.0;
    for (const auto& r : data.records) {
        num += r.force.fy * r.fy_star;
        den += r.fy_star * r.fy_star;
    }
    if (!(den > 0.0)) throw ValidationError("calibration: desired force is zero throughout the data set");
    return num / den;
}

void validate_calibration_delta(double delta) {
    if (!(std::abs(delta) <= kPi / 4.0 + 1e-15)) {
        throw ValidationError("calibration: |delta| must not exceed pi/4, got " + std::to_string(delta));
    }
    if (std::sin(2.0 * delta) == 0.0) throw ValidationError("calibration: delta must be nonzero");
}

std::pair<double, double> calibration_update(double k_hat, double zeta_hat, const CalibrationRecord& rec) {
    validate_calibration_delta(rec.delta);
    if (rec.c1 == 0.0) throw NumericalError("calibration: c1 = 0, update undefined");
    if (rec.c1 < 0.0) {
        // c1 = k/k_hat cos(zeta - zeta_1) < 0 means |zeta - zeta_1| > pi/2: outside the
        // range where the single-argument arctangent recovers the offset.
        throw NumericalError("calibration: c1 < 0, phase error outside the (-pi/2, pi/2) window");
    }
    const double zeta_1 = zeta_hat - rec.delta;
    const double two_delta = 2.0 * rec.delta;
    const double zeta_new = zeta_1 + std::atan((rec.c2 / rec.c1 - std::cos(two_delta)) / std::sin(two_delta));
    const double k_new = rec.c1 * k_hat / std::cos(zeta_new - zeta_1);
    return {k_new, zeta_new};
}

CalibrationResult calibrate(const CommutationParams& initial, double delta, const CalibrationDataSource& source) {
    validate_calibration_delta(delta);
    CalibrationResult result{initial, initial, {}};
    for (int l = 0; l < initial.coil_count(); ++l) {
        const DataSetZ z1 = source(l, 1);
        const DataSetZ z2 = source(l, 2);
        CalibrationRecord rec{delta, fit_calibration_coefficient(z1), fit_calibration_coefficient(z2)};
        const auto idx = static_cast<std::size_t>(l);
        const auto [k, zeta] = calibration_update(initial.k_hat[idx], initial.zeta_hat[idx], rec);
        result.calibrated.k_hat[idx] = k;
        result.calibrated.zeta_hat[idx] = zeta;
        result.records.push_back(rec);
    }
    return result;
}

}  // namespace clmcomm
