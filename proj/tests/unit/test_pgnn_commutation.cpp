#include "clmcomm/allocation.hpp"
#include "clmcomm/pgnn_commutation.hpp"
#include "pgnn_fixtures.hpp"

#include <doctest.h>

#include <cmath>

using namespace clmcomm;
using namespace testsupport;

namespace {

PgnnFullModel classical_model(const CommutationParams& p, const MotorGeometry& g) {
    std::vector<PgnnCoilModel> coils;
    for (std::size_t l = 0; l < p.k_hat.size(); ++l) {
        PgnnCoilModel m = PgnnCoilModel::zeros({2}, {16}, g.pole_pitch, {0.0, 0.1});
        m.set_physical_parameters(ideal_physical_parameters(p.k_hat[l], p.zeta_hat[l], g.mu, g.lever_arm[l]));
        coils.push_back(m);
    }
    return combine_coilsets(coils);
}

PgnnFullModel random_full_model(std::mt19937_64& rng) {
    std::vector<PgnnCoilModel> coils;
    for (int l = 0; l < 3; ++l) coils.push_back(random_model(rng, {2}, {16}));
    return combine_coilsets(coils);
}

}  // namespace

TEST_CASE("target equal to the cogging needs no current") {
    std::mt19937_64 rng(1);
    const PgnnFullModel m = random_full_model(rng);
    const CommutationSolution s = pgnn_commutate(m.mean_cogging(0.02), 0.02, m);
    CHECK(s.norm <= 1e-12);
    const CommutationSolution c = pgnn_commutate_commands(m.mean_cogging(0.02), 0.02, m,
                                                          CommutationParams::uniform(3, 60.0, 0.0));
    for (const auto& cmd : c.commands) {
        CHECK(cmd.magnitude <= 1e-12);
    }
}

TEST_CASE("classical model: pseudoinverse commutation and classical commands") {
    const MotorGeometry g;
    const CommutationParams p{{62.0, 58.0, 61.0}, {-0.5, -0.55, -0.52}};
    const PgnnFullModel m = classical_model(p, g);
    std::mt19937_64 rng(2);
    for (int n = 0; n < 100; ++n) {
        const double y = uniform(rng, -0.1, 0.1);
        const ForceVector f{uniform(rng, -50, 50), uniform(rng, -5, 5), uniform(rng, -0.5, 0.5)};
        const auto ref = pseudoinverse_commutation(f, y, p, g);
        const CommutationSolution s = pgnn_commutate(f, y, m);
        for (std::size_t l = 0; l < 3; ++l) CHECK((s.currents[l].vec() - ref[l].vec()).norm() <= 1e-10);

        const double fy = uniform(rng, -50, 50);
        const CommutationSolution cmd = pgnn_commutate_commands({fy, 0.0, 0.0}, y, m, p);
        const auto shares = force_shares(p, fy);
        for (std::size_t l = 0; l < 3; ++l) {
            // canonical form folds the sign into the phase
            const double signed_mag = std::abs(cmd.commands[l].delta) < 1.0 ? cmd.commands[l].magnitude
                                                                              : -cmd.commands[l].magnitude;
            CHECK(signed_mag == doctest::Approx(shares[l]).epsilon(1e-9));
            CHECK(std::abs(std::sin(cmd.commands[l].delta)) <= 1e-9);
        }
    }
}

TEST_CASE("self-consistency and minimum norm") {
    std::mt19937_64 rng(3);
    for (int n = 0; n < 100; ++n) {
        const PgnnFullModel m = random_full_model(rng);
        const double y = uniform(rng, -0.1, 0.1);
        const ForceVector f{uniform(rng, -50, 50), uniform(rng, -5, 5), uniform(rng, -0.5, 0.5)};
        const CommutationSolution s = pgnn_commutate(f, y, m);
        CHECK((m.predict(s.currents, y) - f).norm() <= 1e-9);
        CHECK((s.predicted_force - f).norm() <= 1e-9);
        CHECK(s.norm == doctest::Approx(current_norm(s.currents)));
        for (const auto& c : s.currents) CHECK(std::abs(c.star_sum()) <= 1e-12);

        // null space computed independently from a full SVD of the star-reduced map in physical coordinates
        const StackedGain k = m.stacked_gain(y);
        Eigen::MatrixXd null = allocation_null_space(k);
        REQUIRE(null.cols() == 3);
        CHECK((k * null).norm() <= 1e-9 * k.norm());
        for (int trial = 0; trial < 5; ++trial) {
            Eigen::VectorXd dir(3);
            for (int j = 0; j < 3; ++j) dir(j) = uniform(rng, -1, 1);
            const auto perturbed = unstack_pairs(stack_pairs(s.currents) + uniform(rng, 1e-3, 1.0) * null * dir);
            CHECK(current_norm(perturbed) > s.norm);
            CHECK((m.predict(perturbed, y) - f).norm() <= 1e-9);
        }
    }
}

TEST_CASE("commands reproduce the currents through the fixed commutation") {
    std::mt19937_64 rng(4);
    const PgnnFullModel m = random_full_model(rng);
    const CommutationParams p{{62.0, 58.0, 61.0}, {-0.5, -0.55, -0.52}};
    const MotorTruth plant = [] {
        MotorTruth t = ideal_truth();
        t.coils = {{61.0, -0.51}, {59.0, -0.57}, {60.0, -0.54}};
        return t;
    }();
    for (int n = 0; n < 200; ++n) {
        const double y = uniform(rng, -0.1, 0.1);
        const ForceVector f{uniform(rng, -50, 50), uniform(rng, -5, 5), uniform(rng, -0.5, 0.5)};
        const CommutationSolution s = pgnn_commutate_commands(f, y, m, p);
        std::vector<CurrentTriple> via;
        for (std::size_t l = 0; l < 3; ++l) {
            const CurrentPair i = command_to_currents(s.commands[l], y, p.fixed(static_cast<int>(l), 0.024));
            CHECK(std::abs(i.a - s.currents[l].a) <= 1e-10);
            CHECK(std::abs(i.b - s.currents[l].b) <= 1e-10);
            via.push_back(expand_star(i));
            const MagnitudePhaseCommand again =
                currents_to_command(i, y, p.fixed(static_cast<int>(l), 0.024));
            CHECK(std::abs(again.magnitude - s.commands[l].magnitude) <= 1e-10);
            CHECK(std::abs(again.delta - s.commands[l].delta) <= 1e-10);
        }
        CHECK((plant_force(via, y, plant) - plant_force(s.currents, y, plant)).norm() <= 1e-10);
    }
}

TEST_CASE("rank deficient model") {
    std::vector<PgnnCoilModel> coils(3, PgnnCoilModel::zeros({2}, {16}, 0.024, {0.0, 0.1}));
    const PgnnFullModel m = combine_coilsets(coils);
    CHECK_THROWS_AS(pgnn_commutate({1.0, 0.0, 0.0}, 0.01, m), NumericalError);
    CHECK_THROWS_WITH_AS(pgnn_commutate({1.0, 0.0, 0.0}, 0.0125, m), doctest::Contains("0.0125"), NumericalError);
}
