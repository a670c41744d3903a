// Acceptance checks, one line per criterion. Exit status 0 only when all pass.

#include "clmcomm/allocation.hpp"
#include "clmcomm/classical_commutation.hpp"
#include "clmcomm/input_transform.hpp"
#include "clmcomm/pgnn.hpp"
#include "clmcomm/pgnn_commutation.hpp"
#include "clmcomm/serialization.hpp"
#include "../unit/pgnn_fixtures.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

using namespace clmcomm;
using namespace testsupport;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1 ---------------------------------------------------------------------------
Outcome exactness() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(1001);
    double trig = 0.0, det = 0.0, round_trip = 0.0, star = 0.0, lip = 0.0;

    MotorTruth t = ideal_truth();
    t.coils = {{62.83, -0.51}, {59.17, -0.57}, {61.0, -0.54}};
    const CommutationParams exact{{62.83, 59.17, 61.0}, {-0.51, -0.57, -0.54}};
    for (int k = 0; k < 1000; ++k) {
        const double y = -0.1 + 0.2 * k / 999.0;
        for (double f = -50.0; f <= 50.0; f += 5.0) {
            const auto i = classical_currents({f, 0.0, 0.0}, y, exact, t.geometry);
            trig = std::max(trig, std::abs(plant_force(i, y, t).fy - f));
            for (const auto& c : i) star = std::max(star, std::abs(c.star_sum()));
        }
    }
    for (int n = 0; n < 1000; ++n) {
        const FixedCommutation g{uniform(rng, 20, 100), uniform(rng, -3, 3), 0.024};
        const double y = uniform(rng, -0.2, 0.2);
        det = std::max(det, std::abs(gamma_matrix(y, g).determinant() + std::sqrt(3.0) / (2.0 * g.k_hat * g.k_hat)));
        const CurrentPair i{uniform(rng, -5, 5), uniform(rng, -5, 5)};
        const CurrentPair back = command_to_currents(currents_to_command(i, y, g), y, g);
        round_trip = std::max({round_trip, std::abs(back.a - i.a), std::abs(back.b - i.b)});
        star = std::max(star, std::abs(expand_star(back).star_sum()));
        const ForceVector f{uniform(rng, -50, 50), uniform(rng, -5, 5), uniform(rng, -0.5, 0.5)};
        for (const auto& c : pseudoinverse_commutation(f, y, exact, t.geometry)) star = std::max(star, std::abs(c.star_sum()));
    }
    for (int n = 0; n < 1000; ++n) {
        const PgnnCoilModel m = random_model(rng, {1 + static_cast<int>(rng() % 4)}, {1 + static_cast<int>(rng() % 20)});
        const double y = uniform(rng, -0.1, 0.1);
        const CurrentPair i{uniform(rng, -3, 3), uniform(rng, -3, 3)};
        const Eigen::VectorXd reg = build_regressor(m, y, i);
        const ForceVector f = m.predict(i, y);
        for (int q = 0; q < 3; ++q) {
            lip = std::max(lip, std::abs(m.linear_parameters(q).dot(reg) - f[q]) / std::max(1.0, std::abs(f[q])));
        }
    }
    const double elapsed = seconds_since(t0);
    const bool ok = trig <= 1e-9 && det <= 1e-12 && round_trip <= 1e-10 && star <= 1e-12 && lip <= 1e-12 && elapsed < 10.0;
    std::ostringstream d;
    d << "trig " << fmt("%.1e", trig) << " N, det " << fmt("%.1e", det) << ", round trip " << fmt("%.1e", round_trip)
      << " A, star " << fmt("%.1e", star) << " A, LIP " << fmt("%.1e", lip) << ", " << fmt("%.2f", elapsed) << " s";
    return {ok, d.str()};
}

// 2 ---------------------------------------------------------------------------
DataSetZ calibration_run(const MotorTruth& t, int coil, double k_hat, double zeta_shifted, double delta) {
    DataSetZ z{coil, delta, {}};
    for (int k = 0; k < 500; ++k) {
        const double y = -0.1 + 0.2 * k / 499.0;
        const double fstar = 30.0 * std::sin(0.23 * k) - 4.0;
        std::vector<CurrentTriple> i(t.coils.size());
        i[static_cast<std::size_t>(coil)] = sinusoidal_currents(fstar, k_hat, t.geometry.electrical_angle(y) + zeta_shifted);
        z.records.push_back({y, plant_force(i, y, t), fstar});
    }
    return z;
}

CalibrationResult calibrate_noise_free(const MotorTruth& t, const CommutationParams& init, double delta) {
    return calibrate(init, delta, [&](int coil, int run) {
        const double s = run == 1 ? -delta : delta;
        const auto l = static_cast<std::size_t>(coil);
        return calibration_run(t, coil, init.k_hat[l], init.zeta_hat[l] + s, s);
    });
}

Outcome calibration_oracle() {
    const MotorTruth mismatched = ideal_truth(61.34, -0.54);
    const CalibrationResult r = calibrate_noise_free(mismatched, CommutationParams::uniform(3, 67.0, -0.52), kPi / 4);
    double err = 0.0;
    for (std::size_t l = 0; l < 3; ++l) {
        err = std::max({err, std::abs(r.calibrated.k_hat[l] - 61.34), std::abs(r.calibrated.zeta_hat[l] + 0.54)});
    }
    MotorTruth t = ideal_truth();
    t.coils = {{62.83, -0.51}, {59.17, -0.57}, {61.0, -0.54}};
    const CommutationParams truth{{62.83, 59.17, 61.0}, {-0.51, -0.57, -0.54}};
    const CalibrationResult fixed = calibrate_noise_free(t, truth, kPi / 4);
    double drift = 0.0;
    for (std::size_t l = 0; l < 3; ++l) {
        drift = std::max({drift, std::abs(fixed.calibrated.k_hat[l] - truth.k_hat[l]),
                          std::abs(fixed.calibrated.zeta_hat[l] - truth.zeta_hat[l])});
    }
    std::ostringstream d;
    d << "k=61.34/zeta=-0.54 from 67/-0.52 in one pass, error " << fmt("%.1e", err) << "; fixed-point drift "
      << fmt("%.1e", drift);
    return {err <= 1e-6 && drift <= 1e-6, d.str()};
}

// 3 ---------------------------------------------------------------------------
Outcome proposition_one() {
    std::mt19937_64 rng(3003);
    const int seeds = 200;
    int violations = 0, mismatched = 0, strict = 0, equal = 0;
    double worst_excess = 0.0;
    for (int n = 0; n < seeds; ++n) {
        // every fifth draw is exactly classical, noise-free data with the fitted anchor
        const bool classical = n % 5 == 0;
        const PlantDraw plant = random_plant(rng, !classical && n % 2 == 1);
        const FixedCommutation fixed{uniform(rng, 50, 70), uniform(rng, -0.6, 0.6), 0.024};
        const IdentificationSet data =
            random_identification_set(rng, plant, 100 + static_cast<int>(rng() % 300), classical ? 0.0 : 0.3, fixed);
        PgnnCoilModel m = random_model(rng, {1 + static_cast<int>(rng() % 4)}, {4 + static_cast<int>(rng() % 20)},
                                       uniform(rng, 0.5, 20));
        Eigen::VectorXd anchor = fit_physical_anchor(data, 0.024);
        if (!classical && n % 3 == 0) {
            for (int k = 0; k < 12; ++k) anchor(k) += uniform(rng, -5, 5);
        }
        RegularizationSpec reg = RegularizationSpec::uniform(uniform(rng, 0.01, 1.0), anchor);
        const double before = anchor_cost(m, data, reg);
        const double corr = anchor_residual_correlation(m, data, reg);
        least_squares_linear(m, data, reg);
        const double after = cost(m, data, reg);
        const double excess = after - before;
        // rounding allowance for the equality branch
        if (excess > 1e-12 * std::max(1.0, before)) ++violations;
        worst_excess = std::max(worst_excess, excess);
        const bool decreased = before - after > 1e-12 * std::max(1.0, before);
        const bool predicted = corr > 1e-9;
        if (decreased != predicted) ++mismatched;
        (predicted ? strict : equal) += 1;
    }
    std::ostringstream d;
    d << seeds << " seeds (" << strict << " strict, " << equal << " equality), " << violations << " violations, "
      << mismatched << " strictness mismatches, max V_LS - V_anchor " << fmt("%.1e", worst_excess);
    return {violations == 0 && mismatched == 0 && strict > 0 && equal > 0, d.str()};
}

// 4 ---------------------------------------------------------------------------
Outcome gradient_check() {
    std::mt19937_64 rng(4004);
    double worst = 0.0, worst_raw = 0.0, worst_raw_mag = 0.0, worst_norm = 0.0;
    const double h = 1e-6;
    // below this magnitude the difference quotient is rounding and truncation bound
    const double kFloor = 1e-2;
    for (int n = 0; n < 20; ++n) {
        std::vector<int> gain_hidden{1 + static_cast<int>(rng() % 4)};
        std::vector<int> cog_hidden{1 + static_cast<int>(rng() % 6)};
        if (n % 2 == 1) cog_hidden.push_back(1 + static_cast<int>(rng() % 4));
        const PlantDraw plant = random_plant(rng, true);
        const IdentificationSet data =
            random_identification_set(rng, plant, 40 + static_cast<int>(rng() % 40), 0.3, {60.0, 0.0, 0.024});
        const PgnnCoilModel m = random_model(rng, gain_hidden, cog_hidden, uniform(rng, 0.5, 3.0));
        Eigen::VectorXd anchor = m.physical_parameters();
        for (int k = 0; k < 12; ++k) anchor(k) += uniform(rng, -1, 1);
        const RegularizationSpec reg = RegularizationSpec::uniform(uniform(rng, 0.05, 0.5), anchor);

        const Eigen::VectorXd g = cost_gradient(m, data, reg);
        const Eigen::VectorXd theta = m.parameters();
        PgnnCoilModel probe = m;
        Eigen::VectorXd fd_all(theta.size());
        for (Eigen::Index k = 0; k < theta.size(); ++k) {
            Eigen::VectorXd tp = theta, tm = theta;
            tp(k) += h;
            tm(k) -= h;
            probe.set_parameters(tp);
            const double vp = cost(probe, data, reg);
            probe.set_parameters(tm);
            const double vm = cost(probe, data, reg);
            const double fd = (vp - vm) / (2.0 * h);
            fd_all(k) = fd;
            const double rel = std::abs(fd - g(k)) / std::max({std::abs(fd), std::abs(g(k)), kFloor});
            worst = std::max(worst, rel);
            const double raw = std::abs(fd - g(k)) / std::max({std::abs(fd), std::abs(g(k)), 1e-300});
            if (raw > worst_raw) {
                worst_raw = raw;
                worst_raw_mag = std::max(std::abs(fd), std::abs(g(k)));
            }
        }
        worst_norm = std::max(worst_norm, (fd_all - g).lpNorm<Eigen::Infinity>() / g.lpNorm<Eigen::Infinity>());
    }
    std::ostringstream d;
    d << "20 models, max componentwise relative error " << fmt("%.2e", worst) << ", normwise " << fmt("%.1e", worst_norm)
      << " (central differences, step 1e-6, denominator floor 1e-2; unfloored " << fmt("%.1e", worst_raw) << " at |g| "
      << fmt("%.1e", worst_raw_mag) << ")";
    return {worst < 1e-5 && worst_norm < 1e-5, d.str()};
}

// 5 ---------------------------------------------------------------------------
Outcome minimum_norm() {
    std::mt19937_64 rng(5005);
    int failures = 0;
    double residual = 0.0;
    double min_gain = std::numeric_limits<double>::infinity();
    for (int n = 0; n < 100; ++n) {
        std::vector<PgnnCoilModel> coils;
        for (int l = 0; l < 3; ++l) coils.push_back(random_model(rng, {2}, {16}));
        const PgnnFullModel model = combine_coilsets(coils);
        const double y = uniform(rng, -0.1, 0.1);
        const ForceVector f{uniform(rng, -50, 50), uniform(rng, -5, 5), uniform(rng, -0.5, 0.5)};
        const CommutationSolution sol = pgnn_commutate(f, y, model);
        residual = std::max(residual, (model.predict(sol.currents, y) - f).norm());

        // null space from an LU kernel, independent of the allocation code
        const Eigen::MatrixXd k = model.stacked_gain(y);
        const Eigen::MatrixXd kernel = Eigen::FullPivLU<Eigen::MatrixXd>(k).kernel();
        const Eigen::VectorXd base = stack_pairs(sol.currents);
        for (int trial = 0; trial < 10; ++trial) {
            Eigen::VectorXd c(kernel.cols());
            for (Eigen::Index j = 0; j < c.size(); ++j) c(j) = uniform(rng, -1, 1);
            const Eigen::VectorXd dir = kernel * c;
            const double scale = uniform(rng, 1e-3, 1.0) / dir.norm();
            const double grown = current_norm(unstack_pairs(base + scale * dir)) - sol.norm;
            min_gain = std::min(min_gain, grown);
            if (!(grown > 0.0)) ++failures;
        }
    }
    std::ostringstream d;
    d << "100 targets x 10 perturbations, " << failures << " without norm increase (smallest increase "
      << fmt("%.1e", min_gain) << " A), max residual " << fmt("%.1e", residual) << " N";
    return {failures == 0 && residual <= 1e-9, d.str()};
}

// 6, 7 --------------------------------------------------------------------------
int run_compare(const fs::path& out) {
    fs::remove_all(out);
    const std::string cmd = std::string("\"") + CLMCOMM_CLI + "\" compare --config \"" + CLMCOMM_DESK_CONFIG +
                            "\" --out \"" + out.string() + "\" > \"" + (out.string() + ".stdout") + "\" 2>&1";
    return std::system(cmd.c_str());
}

double compare_seconds = 0.0;
int compare_status = -1;

Outcome desk_scale(const fs::path& dir) {
    const auto t0 = std::chrono::steady_clock::now();
    compare_status = run_compare(dir);
    compare_seconds = seconds_since(t0);
    if (compare_status != 0) return {false, "compare exited with status " + std::to_string(compare_status)};

    std::ifstream in(dir / "comparison.json");
    const nlohmann::json j = nlohmann::json::parse(in);
    std::map<std::string, nlohmann::json> row;
    for (const auto& r : j.at("strategies")) row[r.at("strategy").get<std::string>()] = r.at("mse");
    const double orig = row.at("original").at("filtered").at("F_y").get<double>();
    const double cls = row.at("classical").at("filtered").at("F_y").get<double>();
    const double pg = row.at("pgnn").at("filtered").at("F_y").get<double>();
    const double track_cls = row.at("classical").at("tracking_m2").get<double>();
    const double track_pg = row.at("pgnn").at("tracking_m2").get<double>();
    const double commutation_ratio = pg / cls;
    const double tracking_ratio = track_pg / track_cls;
    const bool ok = commutation_ratio <= 0.2 && tracking_ratio <= 0.5 && cls <= orig && compare_seconds < 300.0;
    std::ostringstream d;
    d << "filtered F_y MSE original " << fmt("%.3g", orig) << ", classical " << fmt("%.3g", cls) << ", pgnn "
      << fmt("%.3g", pg) << " (ratio " << fmt("%.3f", commutation_ratio) << " <= 0.2); tracking ratio "
      << fmt("%.3f", tracking_ratio) << " <= 0.5; " << fmt("%.0f", compare_seconds) << " s";
    return {ok, d.str()};
}

Outcome determinism(const fs::path& first, const fs::path& second) {
    if (compare_status != 0) return {false, "first compare run failed"};
    if (const int status = run_compare(second); status != 0) {
        return {false, "second compare exited with status " + std::to_string(status)};
    }
    int files = 0;
    std::vector<std::string> differing;
    for (const auto& entry : fs::directory_iterator(first)) {
        const auto name = entry.path().filename();
        if (entry.path().extension() != ".csv" && entry.path().extension() != ".json") continue;
        ++files;
        const std::string a = read_text(entry.path());
        const std::string b = fs::exists(second / name) ? read_text(second / name) : std::string("\x01missing");
        if (a != b) differing.push_back(name.string());
    }
    std::ostringstream d;
    d << files << " CSV/JSON files compared, " << differing.size() << " differ";
    for (const auto& n : differing) d << ' ' << n;
    return {files > 0 && differing.empty(), d.str()};
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "clmcomm_acceptance";
    // optional second argument: criteria to run, e.g. "1,4"
    const std::string only = argc > 2 ? argv[2] : "";
    fs::create_directories(work);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"exactness suite", exactness},
        {"calibration oracle", calibration_oracle},
        {"least-squares initialisation never loses to the anchor", proposition_one},
        {"cost gradient", gradient_check},
        {"minimum-norm allocation", minimum_norm},
        {"desk-scale end to end", [&] { return desk_scale(work / "run_a"); }},
        {"determinism of compare", [&] { return determinism(work / "run_a", work / "run_b"); }},
    };
    int failed = 0;
    int index = 0;
    int run = 0;
    for (const auto& [name, check] : criteria) {
        ++index;
        if (!only.empty() && only.find(std::to_string(index)) == std::string::npos) continue;
        ++run;
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s  %d %s: %s\n", o.pass ? "PASS" : "FAIL", index, name.c_str(), o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    std::printf("%d of %d criteria passed\n", run - failed, run);
    return failed == 0 ? 0 : 1;
}
