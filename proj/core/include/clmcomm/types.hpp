#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace clmcomm {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kPhaseStep = kTwoPi / 3.0;

/// Bad input or configuration. The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Rank deficiency, divergence, non-finite values. The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Forces acting on the translator: driving force, out-of-plane force, out-of-plane torque.
struct ForceVector {
    double fy = 0.0;  ///< [N]
    double fx = 0.0;  ///< [N]
    double tz = 0.0;  ///< [N m]

    static ForceVector from(const Eigen::Vector3d& v) { return {v(0), v(1), v(2)}; }
    Eigen::Vector3d vec() const { return {fy, fx, tz}; }

    double operator[](int axis) const { return axis == 0 ? fy : (axis == 1 ? fx : tz); }
    double& operator[](int axis) { return axis == 0 ? fy : (axis == 1 ? fx : tz); }

    ForceVector operator+(const ForceVector& o) const { return {fy + o.fy, fx + o.fx, tz + o.tz}; }
    ForceVector operator-(const ForceVector& o) const { return {fy - o.fy, fx - o.fx, tz - o.tz}; }
    ForceVector operator*(double s) const { return {fy * s, fx * s, tz * s}; }
    bool operator==(const ForceVector&) const = default;

    double norm() const { return std::sqrt(fy * fy + fx * fx + tz * tz); }
};

/// Three phase currents of one coil set [A].
struct CurrentTriple {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    Eigen::Vector3d vec() const { return {a, b, c}; }
    double star_sum() const { return a + b + c; }
    bool operator==(const CurrentTriple&) const = default;
};

/// The two independent phase currents of a star-connected coil set [A].
struct CurrentPair {
    double a = 0.0;
    double b = 0.0;

    Eigen::Vector2d vec() const { return {a, b}; }
    bool operator==(const CurrentPair&) const = default;
};

/// Star wiring: i_c = -i_a - i_b.
inline CurrentTriple expand_star(const CurrentPair& p) { return {p.a, p.b, -p.a - p.b}; }

/// Drops i_c. Throws ValidationError if the triple violates the star sum by more than 1e-9 A.
CurrentPair reduce_star(const CurrentTriple& t);

/// Euclidean norm over the physical phase currents of all coil sets.
double current_norm(const std::vector<CurrentTriple>& currents);

}  // namespace clmcomm
