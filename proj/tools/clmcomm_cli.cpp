// clmcomm: data generation, calibration, PGNN identification and closed-loop evaluation
// of a simulated coreless linear motor.

#include "clmcomm/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

using namespace clmcomm;
namespace fs = std::filesystem;

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "out";
};

ExperimentConfig load(const Common& c) {
    ExperimentConfig cfg = c.config.empty() ? default_config() : load_config(c.config);
    if (c.seed) cfg.seed = *c.seed;
    cfg.validate();
    return cfg;
}

void progress(const std::string& msg) { std::cerr << msg << '\n'; }

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config, "JSON configuration (defaults built in)")->check(CLI::ExistingFile);
    sub->add_option("--seed", c.seed, "overrides the configured seed");
    sub->add_option("--out", c.out, "output directory")->capture_default_str();
}

const char* kParamsFile = "commutation.json";

// Commutation parameters the data in `dir` was generated with.
CommutationParams data_params(const ExperimentConfig& cfg, const fs::path& dir, const std::string& override_path) {
    if (!override_path.empty()) return load_params(override_path);
    if (fs::exists(dir / kParamsFile)) return load_params(dir / kParamsFile);
    return cfg.initial_params;
}

std::vector<CoilRuns> read_all(const ExperimentConfig& cfg, const fs::path& dir) {
    std::vector<CoilRuns> data;
    for (int l = 0; l < cfg.plant.geometry.coil_count; ++l) {
        data.push_back({read_dataset_csv(dir / dataset_file_name(1, l + 1), l),
                        read_dataset_csv(dir / dataset_file_name(2, l + 1), l)});
    }
    return data;
}

int cmd_gen_data(const Common& c, int coil, int delta_sign, const std::string& params_path) {
    const ExperimentConfig cfg = load(c);
    const CommutationParams params = params_path.empty() ? cfg.initial_params : load_params(params_path);
    params.validate(cfg.plant.geometry.coil_count);
    const int count = cfg.plant.geometry.coil_count;
    if (coil != 0 && (coil < 1 || coil > count)) {
        throw ValidationError("--coil must lie in 1.." + std::to_string(count));
    }
    const fs::path out = c.out;
    for (int l = 0; l < count; ++l) {
        if (coil != 0 && l != coil - 1) continue;
        for (int run = 1; run <= 2; ++run) {
            if ((delta_sign < 0 && run != 1) || (delta_sign > 0 && run != 2)) continue;
            const DataSetZ z = generate_run(cfg, params, l, run);
            const fs::path file = out / dataset_file_name(run, l + 1);
            write_dataset_csv(z, file);
            std::cout << file.string() << ": " << z.size() << " records, delta " << z.delta << " rad\n";
        }
    }
    write_text(out / kParamsFile, params_to_json(params));
    return 0;
}

int cmd_calibrate(const Common& c, const std::string& data_dir) {
    const ExperimentConfig cfg = load(c);
    const CalibrationResult result = calibrate_from(cfg, read_all(cfg, data_dir));
    const fs::path out = c.out;
    write_text(out / "calibration.json", calibration_to_json(result, result.records.front().delta));
    write_text(out / "calibration.csv", calibration_to_csv(result));
    std::printf("%-10s %5s %12s %12s\n", "parameter", "coil", "initial", "calibrated");
    for (std::size_t l = 0; l < result.initial.k_hat.size(); ++l) {
        std::printf("%-10s %5zu %12.4f %12.4f\n", "k_hat", l + 1, result.initial.k_hat[l], result.calibrated.k_hat[l]);
    }
    for (std::size_t l = 0; l < result.initial.k_hat.size(); ++l) {
        std::printf("%-10s %5zu %12.4f %12.4f\n", "zeta_hat", l + 1, result.initial.zeta_hat[l],
                    result.calibrated.zeta_hat[l]);
    }
    return 0;
}

int cmd_identify(const Common& c, const std::string& data_dir, const std::string& params_path) {
    const ExperimentConfig cfg = load(c);
    const CommutationParams params = data_params(cfg, data_dir, params_path);
    const IdentificationResult result = identify_from(cfg, read_all(cfg, data_dir), params, progress);
    const fs::path out = c.out;
    write_text(out / "model.json", model_to_json(result.stored));
    for (std::size_t l = 0; l < result.coils.size(); ++l) {
        write_text(out / ("model_coil_" + std::to_string(l + 1) + ".json"),
                   coil_model_to_json(result.coils[l].model, result.coils[l].anchor));
    }
    write_text(out / "training_curve.csv", training_curve_csv(result.coils));
    std::printf("%5s %14s %14s %14s\n", "coil", "anchor cost", "initial cost", "final cost");
    for (std::size_t l = 0; l < result.coils.size(); ++l) {
        const auto& tr = result.coils[l];
        std::printf("%5zu %14.6e %14.6e %14.6e\n", l + 1, tr.anchor_cost, tr.initial_cost, tr.final_cost);
    }
    return 0;
}

int cmd_evaluate(const Common& c, const std::string& strategy_name, const std::string& model_path,
                 const std::string& params_path) {
    const ExperimentConfig cfg = load(c);
    const StrategyKind kind = parse_strategy(strategy_name);
    if (kind == StrategyKind::pgnn && model_path.empty()) throw ValidationError("--strategy pgnn requires --model");
    if (kind == StrategyKind::classical && params_path.empty()) {
        throw ValidationError("--strategy classical requires --calibration");
    }
    const CommutationParams params = params_path.empty() ? cfg.initial_params : load_params(params_path);
    std::optional<StoredModel> model;
    if (!model_path.empty()) model = load_model(model_path);

    const fs::path out = c.out;
    const fs::path log_file = out / ("log_" + strategy_name + ".csv");
    try {
        const EvaluationResult result =
            evaluate_strategy(cfg, make_strategy(cfg, kind, params, model ? &*model : nullptr));
        write_log_csv(result.log, log_file, cfg.log_stride);
        const std::string report = evaluation_json(cfg, result);
        write_text(out / ("mse_" + strategy_name + ".json"), report);
        std::cout << report;
    } catch (const DivergenceError& e) {
        write_log_csv(e.partial_log(), log_file, cfg.log_stride);
        throw;
    }
    return 0;
}

int cmd_compare(const Common& c) {
    const ExperimentConfig cfg = load(c);
    const ComparisonResult result = run_comparison(cfg, progress);
    write_comparison(cfg, result, c.out);
    std::cout << comparison_table(result);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Commutation of a simulated coreless linear motor: calibration and PGNN identification"};
    app.require_subcommand(1);

    Common common;
    int coil = 0;
    int delta_sign = 0;
    std::string data_dir = "out";
    std::string params_path;
    std::string model_path;
    std::string strategy = "pgnn";

    auto* gen = app.add_subcommand("gen-data", "closed-loop identification runs, one CSV per coil set and sign");
    add_common(gen, common);
    gen->add_option("--coil", coil, "one-based coil set (default: all)");
    gen->add_option("--delta-sign", delta_sign, "-1: run 1 only, +1: run 2 only, 0: both")
        ->check(CLI::IsMember({-1, 0, 1}));
    gen->add_option("--calibration", params_path, "commutation estimates to excite with (default: initial)")
        ->check(CLI::ExistingFile);

    auto* cal = app.add_subcommand("calibrate", "one pass of the data-based motor-constant calibration");
    add_common(cal, common);
    cal->add_option("--data", data_dir, "directory with Z_<i>_<l>.csv")->capture_default_str();

    auto* idn = app.add_subcommand("identify", "train one PGNN per coil set");
    add_common(idn, common);
    idn->add_option("--data", data_dir, "directory with Z_<i>_<l>.csv")->capture_default_str();
    idn->add_option("--calibration", params_path, "commutation the data was generated with")
        ->check(CLI::ExistingFile);

    auto* ev = app.add_subcommand("evaluate", "feedforward identification and evaluation run of one strategy");
    add_common(ev, common);
    ev->add_option("--strategy", strategy, "original | classical | pgnn")
        ->check(CLI::IsMember({"original", "classical", "pgnn"}))
        ->capture_default_str();
    ev->add_option("--model", model_path, "model.json from identify")->check(CLI::ExistingFile);
    ev->add_option("--calibration", params_path, "calibration.json from calibrate")->check(CLI::ExistingFile);

    auto* cmp = app.add_subcommand("compare", "full pipeline and MSE table across strategies");
    add_common(cmp, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (*gen) return cmd_gen_data(common, coil, delta_sign, params_path);
        if (*cal) return cmd_calibrate(common, data_dir);
        if (*idn) return cmd_identify(common, data_dir, params_path);
        if (*ev) return cmd_evaluate(common, strategy, model_path, params_path);
        if (*cmp) return cmd_compare(common);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitValidation;
}
