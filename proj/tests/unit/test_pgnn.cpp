#include "clmcomm/allocation.hpp"
#include "clmcomm/pgnn.hpp"
#include "pgnn_fixtures.hpp"

#include <doctest.h>

#include <cmath>

using namespace clmcomm;
using namespace testsupport;

namespace {

// Prediction with physical parameters at the anchor and zero network outputs.
PgnnCoilModel physical_only(const Eigen::VectorXd& theta_phy) {
    PgnnCoilModel m = PgnnCoilModel::zeros({2}, {16}, 0.024, {0.0, 0.1});
    m.set_physical_parameters(theta_phy);
    return m;
}

}  // namespace

TEST_CASE("gain of a network-free model") {
    std::mt19937_64 rng(1);
    PgnnCoilModel m = random_model(rng, {2}, {3});
    PgnnCoilModel zero = m;
    for (Mlp* net : {&zero.gain_a, &zero.gain_b}) {
        net->weights.back().setZero();
        net->biases.back().setZero();
    }
    CHECK((zero.gain(0.0) - zero.a).norm() <= 1e-12);
    CHECK((zero.gain(0.024 / 4.0) - zero.b).norm() <= 1e-12);

    for (int n = 0; n < 50; ++n) {
        const double y = uniform(rng, -0.1, 0.1);
        auto physical = [&](double p) {
            GainMatrix k = m.gain(p);
            k.col(0) -= m.gain_a.forward(m.scaling.apply(p));
            k.col(1) -= m.gain_b.forward(m.scaling.apply(p));
            return k;
        };
        CHECK((physical(y) - physical(y + 0.024)).norm() <= 1e-10);
    }
}

TEST_CASE("prediction paths") {
    std::mt19937_64 rng(2);
    const PgnnCoilModel m = random_model(rng, {2}, {16});
    const FixedCommutation fixed{63.0, -0.4, 0.024};
    for (int n = 0; n < 50; ++n) {
        const double y = uniform(rng, -0.1, 0.1);
        CHECK(m.predict(CurrentPair{}, y) == m.cogging_force(y));
        const double f = uniform(rng, -30, 30);
        const CurrentTriple classical = sinusoidal_currents(f, fixed.k_hat, fixed.eta(y));
        const ForceVector by_current = m.predict(reduce_star(classical), y);
        const ForceVector by_command = m.predict(MagnitudePhaseCommand{f, 0.0}, y, fixed);
        CHECK((by_current - by_command).norm() <= 1e-10);
    }
}

TEST_CASE("classical parameters reproduce the ideal plant") {
    std::mt19937_64 rng(3);
    const MotorGeometry g;
    for (int l = 0; l < 3; ++l) {
        const CoilSetTruth t{uniform(rng, 40, 80), uniform(rng, -2, 2)};
        const PgnnCoilModel m =
            physical_only(ideal_physical_parameters(t.k, t.zeta, g.mu, g.lever_arm[static_cast<std::size_t>(l)]));
        for (int n = 0; n < 100; ++n) {
            const double y = uniform(rng, -0.2, 0.2);
            const CurrentPair i{uniform(rng, -3, 3), uniform(rng, -3, 3)};
            const Eigen::Vector3d truth = ideal_gain_matrix(y, l, g, t) * expand_star(i).vec();
            CHECK((m.predict(i, y).vec() - truth).norm() <= 1e-9);
        }
    }
}

TEST_CASE("linear-in-parameters reconstruction") {
    std::mt19937_64 rng(4);
    double worst = 0.0;
    for (int n = 0; n < 200; ++n) {
        const PgnnCoilModel m = random_model(rng, {1 + static_cast<int>(rng() % 4)}, {1 + static_cast<int>(rng() % 20)});
        const double y = uniform(rng, -0.1, 0.1);
        const CurrentPair i{uniform(rng, -3, 3), uniform(rng, -3, 3)};
        const Eigen::VectorXd reg = build_regressor(m, y, i);
        const ForceVector f = m.predict(i, y);
        for (int q = 0; q < 3; ++q) {
            worst = std::max(worst, std::abs(m.linear_parameters(q).dot(reg) - f[q]) / std::max(1.0, std::abs(f[q])));
        }
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("regressor layout") {
    PgnnCoilModel m = PgnnCoilModel::zeros({2}, {16}, 0.024, {});
    CHECK(m.linear_dimension() == 27);
    std::mt19937_64 rng(5);
    m = random_model(rng, {2}, {16});
    const Eigen::VectorXd r = build_regressor(m, 0.03, {});
    CHECK(r.head(10).norm() == 0.0);
    CHECK(r.tail(17).norm() > 0.0);
    CHECK(r(26) == 1.0);

    // linear parameters sit where linear_parameter_indices says
    const Eigen::VectorXd theta = m.parameters();
    for (int q = 0; q < 3; ++q) {
        const auto idx = m.linear_parameter_indices(q);
        const Eigen::VectorXd lin = m.linear_parameters(q);
        REQUIRE(static_cast<Eigen::Index>(idx.size()) == lin.size());
        for (std::size_t k = 0; k < idx.size(); ++k) CHECK(theta(idx[k]) == lin(static_cast<Eigen::Index>(k)));
    }
    PgnnCoilModel copy = PgnnCoilModel::zeros({2}, {16}, 0.024, m.scaling);
    copy.set_parameters(theta);
    CHECK(copy.parameters() == theta);
}

TEST_CASE("cost") {
    std::mt19937_64 rng(6);
    const PlantDraw plant = random_plant(rng, false);
    const FixedCommutation fixed{60.0, 0.0, 0.024};
    const IdentificationSet data = random_identification_set(rng, plant, 200, 0.0, fixed);
    const CoilSetTruth& t = plant.truth.coils[static_cast<std::size_t>(plant.coil)];
    const Eigen::VectorXd exact =
        ideal_physical_parameters(t.k, t.zeta, plant.truth.geometry.mu,
                                  plant.truth.geometry.lever_arm[static_cast<std::size_t>(plant.coil)]);
    const PgnnCoilModel perfect = physical_only(exact);

    CHECK(cost(perfect, data, RegularizationSpec::uniform(0.1, exact)) <= 1e-20);
    const Eigen::VectorXd shifted = exact + Eigen::VectorXd::Constant(12, 0.5);
    const RegularizationSpec reg = RegularizationSpec::uniform(0.1, shifted);
    CHECK(cost(perfect, data, reg) == doctest::Approx(12 * 0.05 * 0.05).epsilon(1e-9));
    const RegularizationSpec doubled = RegularizationSpec::uniform(0.2, shifted);
    CHECK(doubled.penalty(exact) == doctest::Approx(4.0 * reg.penalty(exact)).epsilon(1e-14));

    CHECK_THROWS_AS(cost(perfect, IdentificationSet{}, reg), ValidationError);
    RegularizationSpec negative = reg;
    negative.lambda(3) = -1.0;
    CHECK_THROWS_AS(negative.validate(), ValidationError);
}

TEST_CASE("gradient: regularisation leaves the networks alone") {
    std::mt19937_64 rng(7);
    const PlantDraw plant = random_plant(rng, true);
    const IdentificationSet data = random_identification_set(rng, plant, 100, 0.1, {60.0, 0.0, 0.024});
    const PgnnCoilModel m = random_model(rng, {3}, {5});
    Eigen::VectorXd anchor(12);
    for (int k = 0; k < 12; ++k) anchor(k) = uniform(rng, -40, 40);
    const Eigen::VectorXd with = cost_gradient(m, data, RegularizationSpec::uniform(0.3, anchor));
    const Eigen::VectorXd without = cost_gradient(m, data, RegularizationSpec::uniform(0.0, anchor));
    CHECK((with - without).tail(with.size() - 12).norm() == 0.0);
    CHECK((with - without).head(12).norm() > 0.0);
}

TEST_CASE("least squares: first-order optimality and ridge limit") {
    std::mt19937_64 rng(8);
    for (int n = 0; n < 10; ++n) {
        const PlantDraw plant = random_plant(rng, true);
        const IdentificationSet data = random_identification_set(rng, plant, 300, 0.2, {60.0, 0.0, 0.024});
        PgnnCoilModel m = random_model(rng, {2}, {8});
        const Eigen::VectorXd anchor = fit_physical_anchor(data, 0.024);
        const RegularizationSpec reg = RegularizationSpec::uniform(0.1, anchor);
        const LeastSquaresReport rep = least_squares_linear(m, data, reg);
        for (int q = 0; q < 3; ++q) CHECK(rep.rank[static_cast<std::size_t>(q)] == m.linear_dimension());
        const Eigen::VectorXd g = cost_gradient(m, data, reg);
        for (int q = 0; q < 3; ++q) {
            for (Eigen::Index i : m.linear_parameter_indices(q)) CHECK(std::abs(g(i)) <= 1e-8);
        }

        PgnnCoilModel stiff = m;
        least_squares_linear(stiff, data, RegularizationSpec::uniform(1e6, anchor));
        CHECK((stiff.physical_parameters() - anchor).norm() <= 1e-6 * anchor.norm());
        // network output layers still fit the data
        CHECK(stiff.gain_a.weights.back().norm() > 0.0);
    }
}

TEST_CASE("least squares never loses to the anchor") {
    std::mt19937_64 rng(9);
    for (int n = 0; n < 30; ++n) {
        const PlantDraw plant = random_plant(rng, n % 2 == 0);
        const IdentificationSet data = random_identification_set(rng, plant, 200, n % 3 == 0 ? 0.0 : 0.3,
                                                                 {uniform(rng, 50, 70), uniform(rng, -0.5, 0.5), 0.024});
        PgnnCoilModel m = random_model(rng, {2}, {16});
        const RegularizationSpec reg = RegularizationSpec::uniform(0.1, fit_physical_anchor(data, 0.024));
        const double before = anchor_cost(m, data, reg);
        const double corr = anchor_residual_correlation(m, data, reg);
        least_squares_linear(m, data, reg);
        const double after = cost(m, data, reg);
        CHECK(after <= before);
        if (corr > 1e-9) CHECK(after < before);
    }
}

TEST_CASE("exactly classical data: equality branch") {
    std::mt19937_64 rng(10);
    const PlantDraw plant = random_plant(rng, false);
    const IdentificationSet data = random_identification_set(rng, plant, 200, 0.0, {60.0, 0.1, 0.024});
    PgnnCoilModel m = random_model(rng, {2}, {16});
    const RegularizationSpec reg = RegularizationSpec::uniform(0.1, fit_physical_anchor(data, 0.024));
    CHECK(anchor_cost(m, data, reg) <= 1e-20);
    CHECK(anchor_residual_correlation(m, data, reg) <= 1e-9);
    least_squares_linear(m, data, reg);
    CHECK(cost(m, data, reg) <= 1e-20);
}

TEST_CASE("data without excitation is rejected") {
    IdentificationSet data;
    data.y = Eigen::RowVectorXd::LinSpaced(50, -0.1, 0.1);
    data.currents = Eigen::Matrix2Xd::Zero(2, 50);
    data.force = Eigen::Matrix3Xd::Random(3, 50);
    PgnnCoilModel m = PgnnCoilModel::zeros({2}, {4}, 0.024, scaling_for(data));
    CHECK_THROWS_AS(least_squares_linear(m, data, RegularizationSpec::uniform(0.1, Eigen::VectorXd::Zero(12))),
                    NumericalError);
    CHECK_THROWS_AS(fit_physical_anchor(data, 0.024), NumericalError);
}

TEST_CASE("identification set follows the fixed commutation") {
    DataSetZ z1, z2;
    z1.delta = -0.3;
    z2.delta = 0.3;
    z1.records = {{0.01, {1, 2, 3}, 5.0}};
    z2.records = {{-0.02, {4, 5, 6}, -2.0}, {0.03, {7, 8, 9}, 1.0}};
    const FixedCommutation fixed{62.0, 0.2, 0.024};
    const IdentificationSet s = make_identification_set(z1, z2, fixed);
    REQUIRE(s.size() == 3);
    const CurrentPair i = command_to_currents({-2.0, 0.3}, -0.02, fixed);
    CHECK(s.currents(0, 1) == i.a);
    CHECK(s.currents(1, 1) == i.b);
    CHECK(s.force(2, 2) == 9.0);
    const InputScaling sc = scaling_for(s);
    CHECK(sc.apply(-0.02) == doctest::Approx(-1.0));
    CHECK(sc.apply(0.03) == doctest::Approx(1.0));
}

TEST_CASE("combined coil sets") {
    std::mt19937_64 rng(12);
    std::vector<PgnnCoilModel> models;
    for (int l = 0; l < 3; ++l) models.push_back(random_model(rng, {2}, {16}));
    const PgnnFullModel full = combine_coilsets(models);
    for (int n = 0; n < 50; ++n) {
        const double y = uniform(rng, -0.1, 0.1);
        std::vector<CurrentTriple> i;
        for (int l = 0; l < 3; ++l) i.push_back(expand_star({uniform(rng, -2, 2), uniform(rng, -2, 2)}));
        ForceVector sum;
        ForceVector cog;
        for (std::size_t l = 0; l < 3; ++l) {
            sum = sum + models[l].predict(reduce_star(i[l]), y);
            cog = cog + models[l].cogging_force(y) * (1.0 / 3.0);
        }
        CHECK((full.predict(i, y) - (sum - cog * 2.0)).norm() <= 1e-10);
        CHECK((full.predict(std::vector<CurrentTriple>(3), y) - full.mean_cogging(y)).norm() <= 1e-12);
    }

    const PgnnFullModel same = combine_coilsets({models[0], models[0], models[0]});
    const CurrentPair p{0.4, -1.1};
    const double y = 0.012;
    const ForceVector lorentz = models[0].predict(p, y) - models[0].cogging_force(y);
    const ForceVector expect = lorentz * 3.0 + models[0].cogging_force(y);
    CHECK((same.predict({expand_star(p), expand_star(p), expand_star(p)}, y) - expect).norm() <= 1e-10);

    std::vector<PgnnCoilModel> mixed = models;
    mixed[1].pole_pitch = 0.03;
    CHECK_THROWS_AS(combine_coilsets(mixed), ValidationError);
}
