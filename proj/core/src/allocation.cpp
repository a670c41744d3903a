#include "clmcomm/allocation.hpp"

#include <sstream>

namespace clmcomm {

namespace {

// Orthonormal basis of {i : i_a + i_b + i_c = 0}, restricted to its (i_a, i_b) rows.
// Full basis columns: (1, -1, 0)/sqrt2 and (1, 1, -2)/sqrt6.
Eigen::Matrix2d star_basis_top() {
    const double s2 = 1.0 / std::sqrt(2.0);
    const double s6 = 1.0 / std::sqrt(6.0);
    Eigen::Matrix2d p;
    p << s2, s6, -s2, s6;
    return p;
}

Eigen::MatrixXd basis_blocks(Eigen::Index coils) {
    const Eigen::Matrix2d p = star_basis_top();
    Eigen::MatrixXd blocks = Eigen::MatrixXd::Zero(2 * coils, 2 * coils);
    for (Eigen::Index l = 0; l < coils; ++l) blocks.block<2, 2>(2 * l, 2 * l) = p;
    return blocks;
}

}  // namespace

Eigen::Matrix<double, 3, 2> star_reduce(const Eigen::Matrix3d& gain) {
    Eigen::Matrix<double, 3, 2> r;
    r.col(0) = gain.col(0) - gain.col(2);
    r.col(1) = gain.col(1) - gain.col(2);
    return r;
}

std::vector<CurrentTriple> min_norm_allocation(const StackedGain& gain, const Eigen::Vector3d& target, double y,
                                               double rel_tol) {
    if (gain.cols() == 0 || gain.cols() % 2 != 0) throw ValidationError("allocation: gain must be 3 x 2L");
    const Eigen::Index coils = gain.cols() / 2;
    const Eigen::MatrixXd basis = basis_blocks(coils);
    const Eigen::MatrixXd m = gain * basis;

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv.size() < 3 || !(sv(2) > rel_tol * sv(0))) {
        std::ostringstream msg;
        msg << "allocation: gain matrix rank deficient at y = " << y << " (singular values";
        for (Eigen::Index k = 0; k < sv.size(); ++k) msg << ' ' << sv(k);
        msg << ")";
        throw NumericalError(msg.str());
    }
    const Eigen::VectorXd z = svd.matrixV() * (sv.cwiseInverse().asDiagonal() * (svd.matrixU().transpose() * target));
    return unstack_pairs(basis * z);
}

Eigen::MatrixXd allocation_null_space(const StackedGain& gain) {
    const Eigen::Index coils = gain.cols() / 2;
    const Eigen::MatrixXd basis = basis_blocks(coils);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(gain * basis, Eigen::ComputeFullV);
    const Eigen::Index n = gain.cols();
    if (n <= 3) return Eigen::MatrixXd(n, 0);
    // Null space of the map in star coordinates, mapped back to pair coordinates.
    return basis * svd.matrixV().rightCols(n - 3);
}

Eigen::VectorXd stack_pairs(const std::vector<CurrentTriple>& currents) {
    Eigen::VectorXd v(2 * static_cast<Eigen::Index>(currents.size()));
    for (std::size_t l = 0; l < currents.size(); ++l) {
        v(2 * static_cast<Eigen::Index>(l)) = currents[l].a;
        v(2 * static_cast<Eigen::Index>(l) + 1) = currents[l].b;
    }
    return v;
}

std::vector<CurrentTriple> unstack_pairs(const Eigen::VectorXd& pairs) {
    std::vector<CurrentTriple> out(static_cast<std::size_t>(pairs.size() / 2));
    for (std::size_t l = 0; l < out.size(); ++l) {
        out[l] = expand_star({pairs(2 * static_cast<Eigen::Index>(l)), pairs(2 * static_cast<Eigen::Index>(l) + 1)});
    }
    return out;
}

}  // namespace clmcomm
