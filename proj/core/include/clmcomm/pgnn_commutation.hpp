#pragma once

#include "clmcomm/classical_commutation.hpp"
#include "clmcomm/input_transform.hpp"
#include "clmcomm/pgnn.hpp"

#include <vector>

namespace clmcomm {

struct CommutationSolution {
    std::vector<CurrentTriple> currents;
    std::vector<MagnitudePhaseCommand> commands;  ///< empty unless requested
    ForceVector predicted_force;
    double norm = 0.0;  ///< ||i||_2 over all phase currents [A]
};

/// Minimum-power currents for which the identified model predicts f_star:
/// i = K_hat(y)^+ (F* - mean cogging). Throws NumericalError when K_hat(y) has a
/// singular value below 1e-10 sigma_max.
CommutationSolution pgnn_commutate(const ForceVector& f_star, double y, const PgnnFullModel& model);

/// As pgnn_commutate, plus the magnitude/phase commands that make a fixed sinusoidal
/// commutation (with the given estimates) produce the same currents.
CommutationSolution pgnn_commutate_commands(const ForceVector& f_star, double y, const PgnnFullModel& model,
                                            const CommutationParams& fixed_params);

}  // namespace clmcomm
