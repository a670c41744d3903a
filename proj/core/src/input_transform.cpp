#include "clmcomm/input_transform.hpp"

namespace clmcomm {

Eigen::Matrix2d gamma_matrix(double y, const FixedCommutation& fixed) {
    const double eta = fixed.eta(y);
    Eigen::Matrix2d g;
    g << std::sin(eta), std::cos(eta), std::sin(eta + kPhaseStep), std::cos(eta + kPhaseStep);
    return g / fixed.k_hat;
}

IntermediateForcePair forward_transform(const MagnitudePhaseCommand& cmd) {
    return {std::cos(cmd.delta) * cmd.magnitude, std::sin(cmd.delta) * cmd.magnitude};
}

MagnitudePhaseCommand inverse_transform(const IntermediateForcePair& pair) {
    if (pair.f1 == 0.0 && pair.f2 == 0.0) return {0.0, 0.0};
    double delta = std::atan2(pair.f2, pair.f1);
    // atan2(-0.0, negative) gives -pi; keep the half-open range (-pi, pi].
    if (delta <= -kPi) delta = kPi;
    return {std::hypot(pair.f1, pair.f2), delta};
}

CurrentPair command_to_currents(const MagnitudePhaseCommand& cmd, double y, const FixedCommutation& fixed) {
    const auto pair = forward_transform(cmd);
    const Eigen::Vector2d i = gamma_matrix(y, fixed) * Eigen::Vector2d(pair.f1, pair.f2);
    return {i(0), i(1)};
}

MagnitudePhaseCommand currents_to_command(const CurrentPair& currents, double y, const FixedCommutation& fixed) {
    // Closed-form inverse of Gamma using the constant determinant.
    const double eta = fixed.eta(y);
    const double s0 = std::sin(eta);
    const double c0 = std::cos(eta);
    const double s1 = std::sin(eta + kPhaseStep);
    const double c1 = std::cos(eta + kPhaseStep);
    const double det = s0 * c1 - c0 * s1;  // sin(-2pi/3), before the 1/k scaling
    const double f1 = fixed.k_hat * (c1 * currents.a - c0 * currents.b) / det;
    const double f2 = fixed.k_hat * (-s1 * currents.a + s0 * currents.b) / det;
    return inverse_transform({f1, f2});
}

}  // namespace clmcomm
