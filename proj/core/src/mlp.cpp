#include "clmcomm/mlp.hpp"

#include "clmcomm/types.hpp"

namespace clmcomm {

Mlp Mlp::zeros(const std::vector<int>& widths) {
    if (widths.size() < 3) throw ValidationError("mlp: need input, at least one hidden layer, and output");
    if (widths.front() != 1) throw ValidationError("mlp: input width must be 1");
    Mlp net;
    for (std::size_t i = 1; i < widths.size(); ++i) {
        if (widths[i] < 1) throw ValidationError("mlp: layer widths must be >= 1");
        net.weights.push_back(Eigen::MatrixXd::Zero(widths[i], widths[i - 1]));
        net.biases.push_back(Eigen::VectorXd::Zero(widths[i]));
    }
    return net;
}

Mlp Mlp::random(const std::vector<int>& widths, double scale, std::mt19937_64& rng) {
    if (!(scale > 0.0)) throw ValidationError("mlp: init scale must be > 0");
    Mlp net = zeros(widths);
    // First layer: slope w ~ U(-scale, scale), transition point c ~ U(-1, 1), bias -w c.
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (Eigen::Index r = 0; r < net.weights[0].rows(); ++r) {
        const double w = scale * unit(rng);
        net.weights[0](r, 0) = w;
        net.biases[0](r) = -w * unit(rng);
    }
    for (std::size_t i = 1; i + 1 < net.weights.size(); ++i) {
        const double bound = std::sqrt(3.0 / static_cast<double>(net.weights[i].cols()));
        for (Eigen::Index c = 0; c < net.weights[i].cols(); ++c) {
            for (Eigen::Index r = 0; r < net.weights[i].rows(); ++r) net.weights[i](r, c) = bound * unit(rng);
        }
        for (Eigen::Index r = 0; r < net.biases[i].size(); ++r) net.biases[i](r) = bound * unit(rng);
    }
    return net;
}

std::vector<int> Mlp::widths() const {
    std::vector<int> w{static_cast<int>(weights.front().cols())};
    for (const auto& b : biases) w.push_back(static_cast<int>(b.size()));
    return w;
}

std::size_t Mlp::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) n += static_cast<std::size_t>(weights[i].size() + biases[i].size());
    return n;
}

void Mlp::validate() const {
    if (weights.size() < 2 || weights.size() != biases.size()) throw ValidationError("mlp: inconsistent layer count");
    if (weights.front().cols() != 1) throw ValidationError("mlp: input width must be 1");
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i].rows() != biases[i].size()) throw ValidationError("mlp: weight/bias shape mismatch");
        if (i > 0 && weights[i].cols() != weights[i - 1].rows()) throw ValidationError("mlp: layer shape mismatch");
        if (!weights[i].allFinite() || !biases[i].allFinite()) throw ValidationError("mlp: non-finite parameters");
    }
}

Eigen::VectorXd Mlp::hidden(double x) const {
    Eigen::VectorXd a = (weights.front().col(0) * x + biases.front()).array().tanh().matrix();
    for (std::size_t i = 1; i + 1 < weights.size(); ++i) a = (weights[i] * a + biases[i]).array().tanh().matrix();
    return a;
}

Eigen::VectorXd Mlp::forward(double x) const { return weights.back() * hidden(x) + biases.back(); }

Eigen::MatrixXd Mlp::hidden_batch(const Eigen::RowVectorXd& x) const {
    Eigen::MatrixXd a = ((weights.front().col(0) * x).colwise() + biases.front()).array().tanh().matrix();
    for (std::size_t i = 1; i + 1 < weights.size(); ++i) {
        a = ((weights[i] * a).colwise() + biases[i]).array().tanh().matrix();
    }
    return a;
}

Eigen::MatrixXd Mlp::forward_batch(const Eigen::RowVectorXd& x, std::vector<Eigen::MatrixXd>* activations) const {
    if (activations == nullptr) return (weights.back() * hidden_batch(x)).colwise() + biases.back();
    activations->clear();
    activations->push_back(x);
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
        activations->push_back(((weights[i] * activations->back()).colwise() + biases[i]).array().tanh().matrix());
    }
    return (weights.back() * activations->back()).colwise() + biases.back();
}

void Mlp::backward_batch(const std::vector<Eigen::MatrixXd>& activations, const Eigen::MatrixXd& upstream,
                         Mlp& grad) const {
    Eigen::MatrixXd delta = upstream;
    for (std::size_t i = weights.size(); i-- > 0;) {
        const Eigen::MatrixXd& input = activations[i];
        grad.weights[i].noalias() += delta * input.transpose();
        grad.biases[i] += delta.rowwise().sum();
        if (i == 0) break;
        Eigen::MatrixXd back = weights[i].transpose() * delta;
        delta = back.array() * (1.0 - input.array().square());
    }
}

void Mlp::write_parameters(double* out) const {
    for (std::size_t i = 0; i < weights.size(); ++i) {
        Eigen::Map<Eigen::MatrixXd>(out, weights[i].rows(), weights[i].cols()) = weights[i];
        out += weights[i].size();
        Eigen::Map<Eigen::VectorXd>(out, biases[i].size()) = biases[i];
        out += biases[i].size();
    }
}

void Mlp::read_parameters(const double* in) {
    for (std::size_t i = 0; i < weights.size(); ++i) {
        weights[i] = Eigen::Map<const Eigen::MatrixXd>(in, weights[i].rows(), weights[i].cols());
        in += weights[i].size();
        biases[i] = Eigen::Map<const Eigen::VectorXd>(in, biases[i].size());
        in += biases[i].size();
    }
}

}  // namespace clmcomm
