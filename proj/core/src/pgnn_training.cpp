#include "clmcomm/pgnn_training.hpp"

#include <random>
#include <sstream>

namespace clmcomm {

namespace {

class Adam {
public:
    Adam(Eigen::Index n, double lr) : lr_(lr), m_(Eigen::VectorXd::Zero(n)), v_(Eigen::VectorXd::Zero(n)) {}

    void reset() {
        m_.setZero();
        v_.setZero();
        step_ = 0;
    }

    void update(Eigen::VectorXd& theta, const Eigen::VectorXd& grad) {
        ++step_;
        m_ = kBeta1 * m_ + (1.0 - kBeta1) * grad;
        v_ = kBeta2 * v_ + (1.0 - kBeta2) * grad.cwiseAbs2();
        const double c1 = 1.0 - std::pow(kBeta1, step_);
        const double c2 = 1.0 - std::pow(kBeta2, step_);
        theta.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + kEps);
    }

private:
    static constexpr double kBeta1 = 0.9;
    static constexpr double kBeta2 = 0.999;
    static constexpr double kEps = 1e-8;
    double lr_;
    Eigen::VectorXd m_;
    Eigen::VectorXd v_;
    int step_ = 0;
};

void check_finite(double value, int epoch) {
    if (!std::isfinite(value)) {
        std::ostringstream msg;
        msg << "training: non-finite cost at epoch " << epoch;
        throw NumericalError(msg.str());
    }
}

}  // namespace

TrainingResult train(const IdentificationSet& data, double pole_pitch, const TrainingHyperparams& hp) {
    if (data.size() == 0) throw ValidationError("training: empty data");
    if (hp.epochs < 0 || hp.ls_interval < 0) throw ValidationError("training: epochs and ls_interval must be >= 0");

    std::mt19937_64 rng(hp.seed);
    PgnnCoilModel model = PgnnCoilModel::zeros(hp.gain_hidden, hp.cogging_hidden, pole_pitch, scaling_for(data));
    model.gain_a = Mlp::random(model.gain_a.widths(), hp.gain_init_scale, rng);
    model.gain_b = Mlp::random(model.gain_b.widths(), hp.gain_init_scale, rng);
    model.cogging = Mlp::random(model.cogging.widths(), hp.cogging_init_scale, rng);

    TrainingResult result;
    result.anchor = fit_physical_anchor(data, pole_pitch);
    const RegularizationSpec reg = RegularizationSpec::uniform(hp.lambda, result.anchor);
    model.set_physical_parameters(result.anchor);
    result.anchor_cost = anchor_cost(model, data, reg);
    result.anchor_data_mse = result.anchor_cost;  // the anchor carries no regularisation penalty

    least_squares_linear(model, data, reg);
    result.initial_cost = cost(model, data, reg);
    check_finite(result.initial_cost, 0);

    Eigen::VectorXd theta = model.parameters();
    Eigen::VectorXd best = theta;
    double best_cost = result.initial_cost;
    result.curve.push_back({0, result.initial_cost, true});

    Adam adam(theta.size(), hp.learning_rate);
    for (int epoch = 1; epoch <= hp.epochs; ++epoch) {
        double current = 0.0;
        const Eigen::VectorXd grad = cost_gradient(model, data, reg, &current);
        check_finite(current, epoch);
        if (current < best_cost) {
            best_cost = current;
            best = theta;
        }
        adam.update(theta, grad);
        model.set_parameters(theta);

        const bool resolve = epoch == hp.epochs || (hp.ls_interval > 0 && epoch % hp.ls_interval == 0);
        if (resolve) {
            least_squares_linear(model, data, reg);
            theta = model.parameters();
            adam.reset();
            const double after = cost(model, data, reg);
            check_finite(after, epoch);
            if (after < best_cost) {
                best_cost = after;
                best = theta;
            }
            result.curve.push_back({epoch, after, true});
        } else if (epoch % 10 == 0) {
            result.curve.push_back({epoch, current, false});
        }
    }

    model.set_parameters(best);
    result.model = model;
    result.final_cost = best_cost;
    result.data_mse = data_mse(model, data);
    return result;
}

}  // namespace clmcomm
