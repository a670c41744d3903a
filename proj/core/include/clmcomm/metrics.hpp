#pragma once

#include "clmcomm/closed_loop.hpp"

#include <array>
#include <span>
#include <vector>

namespace clmcomm {

/// Zero-order-hold discretisation of 1 / (s / (2 pi f_lp) + 1):
/// out[k+1] = a out[k] + (1 - a) in[k], a = exp(-2 pi f_lp / f_s), out[0] = 0.
std::vector<double> lowpass_filter(std::span<const double> signal, double cutoff_hz, double sample_rate);

inline constexpr double kDefaultLowpassHz = 50.0;

struct MseReport {
    std::array<double, 3> filtered{0.0, 0.0, 0.0};    ///< commutation error F - F*, per axis
    std::array<double, 3> unfiltered{0.0, 0.0, 0.0};
    double tracking = 0.0;                            ///< [m^2]
};

double mean_square(std::span<const double> values);

MseReport mse_report(const ExperimentLog& log, double cutoff_hz = kDefaultLowpassHz);

/// Per-axis commutation error F - F* of a log.
std::array<std::vector<double>, 3> commutation_error(const ExperimentLog& log);

}  // namespace clmcomm
