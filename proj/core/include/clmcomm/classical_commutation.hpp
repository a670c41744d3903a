#pragma once

#include "clmcomm/dataset.hpp"
#include "clmcomm/input_transform.hpp"
#include "clmcomm/motor_plant.hpp"

#include <functional>
#include <vector>

namespace clmcomm {

/// Motor-constant and phase-offset estimates used by sinusoidal commutation, one per coil set.
struct CommutationParams {
    std::vector<double> k_hat;
    std::vector<double> zeta_hat;

    int coil_count() const { return static_cast<int>(k_hat.size()); }
    void validate(int coil_count) const;
    FixedCommutation fixed(int coil, double pole_pitch) const {
        return {k_hat.at(static_cast<std::size_t>(coil)), zeta_hat.at(static_cast<std::size_t>(coil)), pole_pitch};
    }
    /// Same estimate for every coil set.
    static CommutationParams uniform(int coil_count, double k_hat, double zeta_hat);
};

/// Sinusoidal currents [sin eta, sin(eta + 2pi/3), sin(eta - 2pi/3)] * force / k_hat.
/// i_c is set to -i_a - i_b so the star sum is exactly zero.
CurrentTriple sinusoidal_currents(double force, double k_hat, double eta_hat);

/// Driving-force share of each coil set, k_hat_l^2 / sum_m k_hat_m^2 * fy_star.
std::vector<double> force_shares(const CommutationParams& params, double fy_star);

/// Classical commutation of a driving force. Rejects nonzero out-of-plane demands.
std::vector<CurrentTriple> classical_currents(const ForceVector& f_star, double y, const CommutationParams& params,
                                              const MotorGeometry& geom);

/// Minimum-norm inverse of the ideal gain model built from the estimates.
std::vector<CurrentTriple> pseudoinverse_commutation(const ForceVector& f_star, double y,
                                                     const CommutationParams& params, const MotorGeometry& geom);

struct CalibrationRecord {
    double delta = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
};

/// argmin_c sum (F_y - c F_y*)^2 over the data set.
double fit_calibration_coefficient(const DataSetZ& data);

/// One coil-set update from the two fitted coefficients. `zeta_hat` is the estimate the runs
/// were offset from: run 1 used zeta_hat - delta, run 2 zeta_hat + delta.
/// Returns {k_hat, zeta_hat}.
std::pair<double, double> calibration_update(double k_hat, double zeta_hat, const CalibrationRecord& rec);

struct CalibrationResult {
    CommutationParams initial;
    CommutationParams calibrated;
    std::vector<CalibrationRecord> records;  ///< one per coil set
};

/// Yields the data set of run i in {1, 2} for a coil set, generated with phase offset
/// zeta_hat + (-1)^i delta and only that coil set active.
using CalibrationDataSource = std::function<DataSetZ(int coil, int run)>;

CalibrationResult calibrate(const CommutationParams& initial, double delta, const CalibrationDataSource& source);

void validate_calibration_delta(double delta);

}  // namespace clmcomm
