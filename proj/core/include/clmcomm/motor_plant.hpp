#pragma once

// Ground-truth electromagnetic part of a three-phase coreless linear motor.
//
// Each coil set l produces F^l = K^l(y) i^l with the ideal gain matrix
//
//   K^l(y) = 2/3 k^l [      sin(eta)       sin(eta + 2pi/3)       sin(eta - 2pi/3) ]
//                    [   mu cos(eta)    mu cos(eta + 2pi/3)    mu cos(eta - 2pi/3) ]
//                    [ d mu cos(eta)  d mu cos(eta + 2pi/3)  d mu cos(eta - 2pi/3) ]
//
//   eta = 2 pi y / d_m + zeta^l
//
// The synthetic plant multiplies each row (force axis) of K^l by a position
// dependent ripple factor 1 + sum_n a_n sin(2 pi n y / d_m + phi_n), adds a
// Fourier-series cogging force and optional white measurement noise. The
// ripple keeps the plant linear in the currents.

#include "clmcomm/types.hpp"

#include <array>
#include <optional>
#include <random>
#include <vector>

namespace clmcomm {

struct MotorGeometry {
    int coil_count = 3;
    double pole_pitch = 0.024;                       ///< d_m [m]
    std::vector<double> lever_arm{-0.06, 0.0, 0.06};  ///< d^l [m], one per coil set
    double mu = 0.1;                                 ///< orthogonal motor-constant ratio

    void validate() const;
    /// Electrical angle without offset, 2 pi y / d_m.
    double electrical_angle(double y) const { return kTwoPi * y / pole_pitch; }
};

struct CoilSetTruth {
    double k = 60.0;     ///< motor constant [N/A]
    double zeta = 0.0;   ///< commutation phase offset [rad]
};

/// One Fourier term amplitude * sin(2 pi order y / d_m + phase).
struct HarmonicTerm {
    int order = 1;
    double amplitude = 0.0;  ///< fraction for gain ripple, N or N m for cogging
    double phase = 0.0;      ///< [rad]
};

using HarmonicSeries = std::vector<HarmonicTerm>;

double evaluate_series(const HarmonicSeries& series, double y, double pole_pitch);

struct ParasiticProfile {
    /// gain_harmonics[coil][axis]; may be empty (no ripple on any coil).
    std::vector<std::array<HarmonicSeries, 3>> gain_harmonics;
    std::array<HarmonicSeries, 3> cogging;
    std::array<double, 3> noise_std{0.0, 0.0, 0.0};

    void validate(int coil_count) const;
    bool noise_enabled() const { return noise_std[0] > 0.0 || noise_std[1] > 0.0 || noise_std[2] > 0.0; }
};

struct MotorTruth {
    MotorGeometry geometry;
    std::vector<CoilSetTruth> coils;
    ParasiticProfile parasitics;

    void validate() const;
};

/// Ideal 3x3 gain matrix of one coil set.
Eigen::Matrix3d ideal_gain_matrix(double y, int coil, const MotorGeometry& geom, const CoilSetTruth& truth);

/// Gain matrix including the configured row ripple.
Eigen::Matrix3d plant_gain_matrix(double y, int coil, const MotorTruth& truth);

/// Ground-truth cogging force at position y.
ForceVector cogging_truth(double y, const ParasiticProfile& profile, double pole_pitch);

/// Per-axis Gaussian force measurement noise, owned by a single simulation run.
class MeasurementNoise {
public:
    MeasurementNoise(std::array<double, 3> std_dev, std::uint64_t seed);
    ForceVector sample();

private:
    std::array<double, 3> std_dev_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> unit_{0.0, 1.0};
};

/// Force generated by all coil sets plus cogging. Noise is added when a generator is given.
ForceVector plant_force(const std::vector<CurrentTriple>& currents, double y, const MotorTruth& truth,
                        MeasurementNoise* noise = nullptr);

}  // namespace clmcomm
