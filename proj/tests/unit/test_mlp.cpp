#include "clmcomm/mlp.hpp"
#include "clmcomm/types.hpp"

#include <doctest.h>

#include <cmath>

using namespace clmcomm;

TEST_CASE("zero network outputs zero") {
    const Mlp net = Mlp::zeros({1, 4, 3});
    CHECK(net.forward(0.7).norm() == 0.0);
    CHECK(net.parameter_count() == 4 + 4 + 12 + 3);
    CHECK(net.widths() == std::vector<int>{1, 4, 3});
    CHECK(net.last_hidden_width() == 4);
}

TEST_CASE("output bias passes through") {
    Mlp net = Mlp::zeros({1, 3, 3});
    net.biases.back() = Eigen::Vector3d(1.5, -2.0, 0.25);
    CHECK((net.forward(-0.3) - Eigen::Vector3d(1.5, -2.0, 0.25)).norm() == 0.0);
}

TEST_CASE("single tanh neuron") {
    Mlp net = Mlp::zeros({1, 1, 3});
    net.weights[0](0, 0) = 1.0;
    net.weights[1](0, 0) = 1.0;
    const Eigen::VectorXd out = net.forward(0.5);
    CHECK(out(0) == doctest::Approx(0.46211715726000974).epsilon(1e-14));
    CHECK(out(1) == 0.0);
    CHECK(out(2) == 0.0);
    CHECK(net.hidden(0.5)(0) == doctest::Approx(std::tanh(0.5)));
}

TEST_CASE("batched evaluation matches pointwise") {
    std::mt19937_64 rng(3);
    Mlp net = Mlp::random({1, 5, 4, 3}, 2.0, rng);
    net.weights.back().setRandom();
    net.biases.back().setRandom();
    Eigen::RowVectorXd x = Eigen::RowVectorXd::LinSpaced(17, -1.2, 1.1);
    const Eigen::MatrixXd batch = net.forward_batch(x);
    const Eigen::MatrixXd hidden = net.hidden_batch(x);
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        CHECK((batch.col(k) - net.forward(x(k))).norm() <= 1e-14);
        CHECK((hidden.col(k) - net.hidden(x(k))).norm() <= 1e-14);
    }
}

TEST_CASE("backward pass against finite differences") {
    std::mt19937_64 rng(5);
    Mlp net = Mlp::random({1, 3, 2, 3}, 1.5, rng);
    net.weights.back().setRandom();
    Eigen::RowVectorXd x = Eigen::RowVectorXd::LinSpaced(9, -1.0, 1.0);
    Eigen::MatrixXd up = Eigen::MatrixXd::Random(3, 9);
    auto loss = [&](const Mlp& m) { return (m.forward_batch(x).array() * up.array()).sum(); };

    std::vector<Eigen::MatrixXd> act;
    net.forward_batch(x, &act);
    Mlp grad = net;
    for (auto& w : grad.weights) w.setZero();
    for (auto& b : grad.biases) b.setZero();
    net.backward_batch(act, up, grad);

    const auto n = static_cast<Eigen::Index>(net.parameter_count());
    Eigen::VectorXd theta(n), g(n);
    net.write_parameters(theta.data());
    grad.write_parameters(g.data());
    for (Eigen::Index k = 0; k < n; ++k) {
        Mlp plus = net, minus = net;
        Eigen::VectorXd tp = theta, tm = theta;
        tp(k) += 1e-6;
        tm(k) -= 1e-6;
        plus.read_parameters(tp.data());
        minus.read_parameters(tm.data());
        const double fd = (loss(plus) - loss(minus)) / 2e-6;
        CHECK(std::abs(fd - g(k)) <= 1e-7 * std::max(1.0, std::abs(fd)));
    }
}

TEST_CASE("parameter round trip") {
    std::mt19937_64 rng(7);
    const Mlp net = Mlp::random({1, 6, 3}, 1.0, rng);
    std::vector<double> buf(net.parameter_count());
    net.write_parameters(buf.data());
    Mlp copy = Mlp::zeros(net.widths());
    copy.read_parameters(buf.data());
    for (std::size_t i = 0; i < net.weights.size(); ++i) {
        CHECK(copy.weights[i] == net.weights[i]);
        CHECK(copy.biases[i] == net.biases[i]);
    }
}

TEST_CASE("random initialisation") {
    std::mt19937_64 rng(11);
    const Mlp net = Mlp::random({1, 200, 8, 3}, 5.0, rng);
    // output layer starts at zero
    CHECK(net.weights.back().norm() == 0.0);
    CHECK(net.biases.back().norm() == 0.0);
    for (Eigen::Index j = 0; j < 200; ++j) {
        const double w = net.weights[0](j, 0);
        CHECK(std::abs(w) <= 5.0);
        // the tanh transition lies inside the input range
        CHECK(std::abs(-net.biases[0](j) / w) <= 1.0 + 1e-12);
    }
    CHECK(net.weights[1].cwiseAbs().maxCoeff() <= std::sqrt(3.0 / 200.0));

    std::mt19937_64 a(4), b(4);
    CHECK(Mlp::random({1, 5, 3}, 1.0, a).weights[0] == Mlp::random({1, 5, 3}, 1.0, b).weights[0]);
    CHECK_THROWS_AS(Mlp::random({1, 5, 3}, 0.0, a), ValidationError);
    CHECK_THROWS_AS(Mlp::zeros({1, 3}), ValidationError);
    CHECK_THROWS_AS(Mlp::zeros({2, 3, 3}), ValidationError);

    Mlp bad = Mlp::zeros({1, 2, 3});
    bad.weights[0](0, 0) = std::nan("");
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}
