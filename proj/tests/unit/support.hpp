#pragma once

#include "clmcomm/motor_plant.hpp"

#include <random>

namespace testsupport {

/// Three coil sets, no parasitics.
inline clmcomm::MotorTruth ideal_truth(double k = 60.0, double zeta = 0.0) {
    clmcomm::MotorTruth t;
    t.coils.assign(3, {k, zeta});
    return t;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace testsupport
