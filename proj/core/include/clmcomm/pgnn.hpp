#pragma once

// Physics-guided neural network model of one coil set:
//
//   F_hat = K_hat(y) i + F_cog(y)
//   K_hat(y) = A cos(2 pi y / d_m) + B sin(2 pi y / d_m) + [ f_a(y)  f_b(y) ]
//   F_cog(y) = f_cog(y)
//
// with i = (i_a, i_b) the star-reduced currents, A, B 3x2 physical parameters and
// f_a, f_b, f_cog networks with three outputs. The physics terms use the raw
// position; the networks see the position scaled to [-1, 1] over the stroke.
//
// The model is linear in A, B and the output layers of the three networks. Per
// force axis q the prediction is theta_q^T M(t) with the regressor
//
//   M = [cos i_a, cos i_b, sin i_a, sin i_b, h_a i_a, i_a, h_b i_b, i_b, h_cog, 1]
//
// (h = last hidden activation). M is the same for every axis; only the targets
// and the physical regularisation weights differ.

#include "clmcomm/dataset.hpp"
#include "clmcomm/input_transform.hpp"
#include "clmcomm/mlp.hpp"
#include "clmcomm/types.hpp"

#include <array>
#include <vector>

namespace clmcomm {

using GainMatrix = Eigen::Matrix<double, 3, 2>;

/// Affine map of raw position onto the network input range.
struct InputScaling {
    double center = 0.0;
    double half_span = 1.0;

    double apply(double y) const { return (y - center) / half_span; }
};

struct PgnnCoilModel {
    GainMatrix a = GainMatrix::Zero();
    GainMatrix b = GainMatrix::Zero();
    Mlp gain_a;   ///< correction of the i_a column
    Mlp gain_b;   ///< correction of the i_b column
    Mlp cogging;
    double pole_pitch = 0.024;
    InputScaling scaling;

    /// Zero networks with the given hidden widths (single value = one hidden layer).
    static PgnnCoilModel zeros(const std::vector<int>& gain_hidden, const std::vector<int>& cogging_hidden,
                               double pole_pitch, InputScaling scaling);

    void validate() const;

    GainMatrix gain(double y) const;
    ForceVector cogging_force(double y) const;
    ForceVector predict(const CurrentPair& currents, double y) const;
    /// Command path: currents are formed by the fixed commutation first.
    ForceVector predict(const MagnitudePhaseCommand& cmd, double y, const FixedCommutation& fixed) const;

    /// vec(A) followed by vec(B), column-major (12 entries).
    Eigen::VectorXd physical_parameters() const;
    void set_physical_parameters(const Eigen::VectorXd& theta_phy);

    /// [theta_phy, gain_a, gain_b, cogging] flattened.
    std::size_t parameter_count() const;
    Eigen::VectorXd parameters() const;
    void set_parameters(const Eigen::VectorXd& theta);

    /// Number of linear parameters per force axis.
    Eigen::Index linear_dimension() const;
    Eigen::VectorXd linear_parameters(int axis) const;
    void set_linear_parameters(int axis, const Eigen::VectorXd& theta_l);
    /// Positions inside parameters() of linear_parameters(axis), in the same order.
    std::vector<Eigen::Index> linear_parameter_indices(int axis) const;
};

/// Index of A(q, j) / B(q, j) inside the 12-entry physical parameter vector.
constexpr int physical_index_a(int q, int j) { return 3 * j + q; }
constexpr int physical_index_b(int q, int j) { return 6 + 3 * j + q; }

/// Regressor M(t) shared by all axes (see file comment).
Eigen::VectorXd build_regressor(const PgnnCoilModel& model, double y, const CurrentPair& currents);

struct RegularizationSpec {
    Eigen::VectorXd lambda;  ///< diagonal of Lambda, 12 entries, >= 0
    Eigen::VectorXd anchor;  ///< theta_phy*, 12 entries

    static RegularizationSpec uniform(double weight, const Eigen::VectorXd& anchor);
    void validate() const;
    double penalty(const Eigen::VectorXd& theta_phy) const;
};

/// Identification records of one coil set with the currents already formed.
struct IdentificationSet {
    Eigen::RowVectorXd y;
    Eigen::Matrix2Xd currents;  ///< (i_a, i_b) per record
    Eigen::Matrix3Xd force;     ///< measured (F_y, F_x, T_z) per record

    Eigen::Index size() const { return y.size(); }
};

/// Stacks both runs. The currents are those the fixed commutation produced for
/// (F_y*, delta) at each position.
IdentificationSet make_identification_set(const DataSetZ& z1, const DataSetZ& z2, const FixedCommutation& fixed);

/// Network input range covering the recorded positions.
InputScaling scaling_for(const IdentificationSet& data);

/// Model predictions for every record (3 x T).
Eigen::Matrix3Xd predict_batch(const PgnnCoilModel& model, const IdentificationSet& data);

/// V = 1/(2N) sum_t ||F - F_hat||^2 + ||Lambda (theta_phy - theta_phy*)||^2, with 2N the
/// number of records in both runs.
double cost(const PgnnCoilModel& model, const IdentificationSet& data, const RegularizationSpec& reg);

/// Data-fit part of the cost only.
double data_mse(const PgnnCoilModel& model, const IdentificationSet& data);

/// Exact gradient of cost() with respect to parameters(). Optionally returns the cost.
Eigen::VectorXd cost_gradient(const PgnnCoilModel& model, const IdentificationSet& data,
                              const RegularizationSpec& reg, double* cost_out = nullptr);

/// Cost of the model with physical parameters at the anchor and zero network outputs.
double anchor_cost(const PgnnCoilModel& model, const IdentificationSet& data, const RegularizationSpec& reg);

/// max_q || 1/(2N) sum_t M(t) (F_q - M(t)^T [theta*_q; 0]) ||_inf. Nonzero exactly when the
/// least-squares update lowers the cost below the anchor.
double anchor_residual_correlation(const PgnnCoilModel& model, const IdentificationSet& data,
                                   const RegularizationSpec& reg);

struct LeastSquaresReport {
    std::array<double, 3> condition{0.0, 0.0, 0.0};  ///< estimate per axis
    std::array<Eigen::Index, 3> rank{0, 0, 0};       ///< numerical rank of the stacked system
};

/// Replaces the linear parameters of every axis by the regularised least-squares solution
/// for the current hidden layers. Collinear network features get the minimum-norm solution;
/// data that does not excite both current columns throws NumericalError.
LeastSquaresReport least_squares_linear(PgnnCoilModel& model, const IdentificationSet& data,
                                        const RegularizationSpec& reg);

/// Physical parameters fitted with the networks absent and no regularisation.
Eigen::VectorXd fit_physical_anchor(const IdentificationSet& data, double pole_pitch);

/// Physical parameters that reproduce the ideal star-reduced gain of a coil set with
/// motor constant k, offset zeta, orthogonal ratio mu and lever arm d.
Eigen::VectorXd ideal_physical_parameters(double k, double zeta, double mu, double lever_arm);

/// All coil-set models; cogging is averaged since every per-coil model learned the full cogging.
struct PgnnFullModel {
    std::vector<PgnnCoilModel> coils;

    int coil_count() const { return static_cast<int>(coils.size()); }
    void validate() const;
    Eigen::Matrix<double, 3, Eigen::Dynamic> stacked_gain(double y) const;
    ForceVector mean_cogging(double y) const;
    ForceVector predict(const std::vector<CurrentTriple>& currents, double y) const;
};

PgnnFullModel combine_coilsets(std::vector<PgnnCoilModel> models);

}  // namespace clmcomm
