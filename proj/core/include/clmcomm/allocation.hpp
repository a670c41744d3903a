#pragma once

#include "clmcomm/types.hpp"

#include <vector>

namespace clmcomm {

/// Stacked star-reduced gain [K^1 ... K^L], 3 x 2L, acting on (i_a^l, i_b^l) pairs.
using StackedGain = Eigen::Matrix<double, 3, Eigen::Dynamic>;

/// Reduces a 3x3 gain on (i_a, i_b, i_c) to a 3x2 gain on (i_a, i_b) using i_c = -i_a - i_b.
Eigen::Matrix<double, 3, 2> star_reduce(const Eigen::Matrix3d& gain);

/// Minimum dissipated-power currents realising `target = K i`.
///
/// The norm minimised is the physical one over all three phases of every coil set,
/// sum_l (i_a^2 + i_b^2 + i_c^2). The star constraint is eliminated with an orthonormal
/// basis of the zero-sum plane, so the pseudoinverse is taken in coordinates where that
/// norm is Euclidean. Singular values below rel_tol * sigma_max raise NumericalError
/// mentioning `y`.
std::vector<CurrentTriple> min_norm_allocation(const StackedGain& gain, const Eigen::Vector3d& target, double y,
                                               double rel_tol = 1e-10);

/// Orthonormal basis of the null space of the allocation map, as stacked (i_a, i_b) pair
/// perturbations (2L x (2L - 3)). Empty when L == 1.
Eigen::MatrixXd allocation_null_space(const StackedGain& gain);

/// Stacks per-coil pairs into a 2L vector and back.
Eigen::VectorXd stack_pairs(const std::vector<CurrentTriple>& currents);
std::vector<CurrentTriple> unstack_pairs(const Eigen::VectorXd& pairs);

}  // namespace clmcomm
