#pragma once

// Change of inputs for drives whose sinusoidal commutation law is fixed.
// Instead of two phase currents the drive accepts a magnitude F and a phase
// offset Delta:
//
//   i = 1/k [ sin(eta + Delta)        ] F  =  Gamma(y) T(F, Delta)
//           [ sin(eta + Delta + 2pi/3)]
//
//   Gamma(y) = 1/k [ sin(eta)           cos(eta)          ]
//                  [ sin(eta + 2pi/3)   cos(eta + 2pi/3)  ]
//
//   T(F, Delta) = (F cos Delta, F sin Delta)
//
// det Gamma = -sqrt(3) / (2 k^2) for all y, so the map is invertible everywhere.

#include "clmcomm/types.hpp"

namespace clmcomm {

struct MagnitudePhaseCommand {
    double magnitude = 0.0;  ///< F_y^l* [N], >= 0 in canonical form
    double delta = 0.0;      ///< phase offset [rad], canonical range (-pi, pi]
};

struct IntermediateForcePair {
    double f1 = 0.0;
    double f2 = 0.0;
};

/// Fixed sinusoidal commutation of one coil set (the estimates it was configured with).
struct FixedCommutation {
    double k_hat = 60.0;
    double zeta_hat = 0.0;
    double pole_pitch = 0.024;

    double eta(double y) const { return kTwoPi * y / pole_pitch + zeta_hat; }
};

Eigen::Matrix2d gamma_matrix(double y, const FixedCommutation& fixed);

IntermediateForcePair forward_transform(const MagnitudePhaseCommand& cmd);

/// Uses atan2, so F1 <= 0 is handled. (0, 0) maps to (0, 0).
MagnitudePhaseCommand inverse_transform(const IntermediateForcePair& pair);

CurrentPair command_to_currents(const MagnitudePhaseCommand& cmd, double y, const FixedCommutation& fixed);

MagnitudePhaseCommand currents_to_command(const CurrentPair& currents, double y, const FixedCommutation& fixed);

}  // namespace clmcomm
