#pragma once

#include <Eigen/Dense>

#include <random>
#include <vector>

namespace clmcomm {

/// Fully connected network with scalar input, tanh hidden layers and an affine output layer.
///
/// weights[i] has shape (widths[i+1], widths[i]); biases[i] has widths[i+1] entries.
struct Mlp {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;

    /// widths = {1, n_1, ..., n_I, n_out}, I >= 1.
    static Mlp zeros(const std::vector<int>& widths);
    /// First hidden layer: slopes uniform in [-scale, scale] with the tanh transitions spread
    /// uniformly over the input range [-1, 1]. Deeper hidden layers uniform with variance
    /// 1/fan_in. Output layer zero.
    static Mlp random(const std::vector<int>& widths, double scale, std::mt19937_64& rng);

    std::vector<int> widths() const;
    int output_width() const { return static_cast<int>(biases.back().size()); }
    /// Width of the last hidden layer, the layer the output is affine in.
    int last_hidden_width() const { return static_cast<int>(weights.back().cols()); }
    std::size_t parameter_count() const;
    void validate() const;

    Eigen::VectorXd forward(double x) const;
    /// Activation of the last hidden layer.
    Eigen::VectorXd hidden(double x) const;

    /// Batched evaluation over columns of x (1 x T). `activations`, when given, receives the
    /// input followed by every hidden activation, as needed by backward_batch.
    Eigen::MatrixXd forward_batch(const Eigen::RowVectorXd& x, std::vector<Eigen::MatrixXd>* activations = nullptr) const;
    /// Last hidden activation for each column of x (n_I x T).
    Eigen::MatrixXd hidden_batch(const Eigen::RowVectorXd& x) const;

    /// Accumulates d(loss)/d(parameters) into `grad` (same shapes) given the upstream
    /// gradient with respect to the outputs (n_out x T).
    void backward_batch(const std::vector<Eigen::MatrixXd>& activations, const Eigen::MatrixXd& upstream,
                        Mlp& grad) const;

    /// Flattened parameters: per layer, W in column-major order followed by b.
    void write_parameters(double* out) const;
    void read_parameters(const double* in);
};

}  // namespace clmcomm
