#include "clmcomm/pipeline.hpp"

#include "clmcomm/csv.hpp"

#include <json.hpp>

#include <cstdio>
#include <sstream>

namespace clmcomm {

using nlohmann::json;

namespace {

void report(const ProgressSink& progress, const std::string& msg) {
    if (progress) progress(msg);
}

json mse_json(const MseReport& m) {
    return {{"filtered", {{"F_y", m.filtered[0]}, {"F_x", m.filtered[1]}, {"T_z", m.filtered[2]}}},
            {"unfiltered", {{"F_y", m.unfiltered[0]}, {"F_x", m.unfiltered[1]}, {"T_z", m.unfiltered[2]}}},
            {"tracking_m2", m.tracking}};
}

// The controller and sample rate are not part of the method; reports say so.
json loop_json(const ExperimentConfig& cfg) {
    const PidGains g = cfg.feedback_gains();
    return {{"note", "feedback controller and sample rate are simulation defaults, not identified quantities"},
            {"sample_rate_Hz", cfg.mech.sample_rate},
            {"pid",
             {{"kp_N_per_m", g.kp},
              {"ki_N_per_ms", g.ki},
              {"kd_Ns_per_m", g.kd},
              {"derivative_cutoff_Hz", g.derivative_cutoff},
              {"integrator_limit_N", g.integrator_limit}}},
            {"lowpass_Hz", cfg.lowpass_hz}};
}

json ff_json(const FeedforwardParams& ff) {
    return {{"mass_kg", ff.mass}, {"viscous_Ns_per_m", ff.viscous}, {"coulomb_N", ff.coulomb}};
}

json evaluation_entry(const EvaluationResult& r) {
    return {{"strategy", r.strategy}, {"feedforward", ff_json(r.feedforward)}, {"mse", mse_json(r.mse)},
            {"samples", r.log.size()}};
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

}  // namespace

ReferenceSamples reference_for(const ExperimentConfig& cfg) {
    return build_reference(cfg.reference.moves(), cfg.mech.sample_rate);
}

LoopSetup loop_setup_for(const ExperimentConfig& cfg) {
    return {cfg.plant, cfg.mech, cfg.feedback_gains(), cfg.guard_margin};
}

DataSetZ generate_run(const ExperimentConfig& cfg, const CommutationParams& params, int coil, int run) {
    const auto seed = derive_seed(cfg.seed, seed_stream::kData + 10 * static_cast<std::uint64_t>(coil) +
                                                static_cast<std::uint64_t>(run));
    return generate_dataset(coil, run, cfg.calibration_delta, reference_for(cfg), params, loop_setup_for(cfg), seed);
}

std::vector<CoilRuns> generate_all(const ExperimentConfig& cfg, const CommutationParams& params,
                                   const ProgressSink& progress) {
    std::vector<CoilRuns> out;
    for (int l = 0; l < cfg.plant.geometry.coil_count; ++l) {
        report(progress, "generating data for coil set " + std::to_string(l + 1));
        out.push_back({generate_run(cfg, params, l, 1), generate_run(cfg, params, l, 2)});
    }
    return out;
}

CalibrationResult calibrate_from(const ExperimentConfig& cfg, const std::vector<CoilRuns>& data) {
    if (static_cast<int>(data.size()) != cfg.initial_params.coil_count()) {
        throw ValidationError("calibration: need both runs of every coil set");
    }
    const double delta = data.front()[1].delta;
    for (const auto& runs : data) {
        if (runs[0].empty() || runs[1].empty()) throw ValidationError("calibration: empty data set");
        if (runs[1].delta != delta || runs[0].delta != -delta) {
            throw ValidationError("calibration: runs must use offsets -delta and +delta with one common delta");
        }
    }
    return calibrate(cfg.initial_params, delta,
                     [&](int coil, int run) { return data[static_cast<std::size_t>(coil)][static_cast<std::size_t>(run - 1)]; });
}

IdentificationResult identify_from(const ExperimentConfig& cfg, const std::vector<CoilRuns>& data,
                                   const CommutationParams& params, const ProgressSink& progress) {
    const int coils = cfg.plant.geometry.coil_count;
    if (static_cast<int>(data.size()) != coils) throw ValidationError("identify: need both runs of every coil set");
    params.validate(coils);
    const double pitch = cfg.plant.geometry.pole_pitch;

    IdentificationResult result;
    std::vector<PgnnCoilModel> models;
    for (int l = 0; l < coils; ++l) {
        const auto& runs = data[static_cast<std::size_t>(l)];
        const IdentificationSet set = make_identification_set(runs[0].decimated(cfg.training.decimation),
                                                              runs[1].decimated(cfg.training.decimation),
                                                              params.fixed(l, pitch));
        TrainingHyperparams hp = cfg.training;
        hp.seed = derive_seed(cfg.seed, seed_stream::kTraining + static_cast<std::uint64_t>(l));
        report(progress, "training coil set " + std::to_string(l + 1) + " on " + std::to_string(set.size()) +
                             " records");
        TrainingResult tr = train(set, pitch, hp);
        report(progress, "coil set " + std::to_string(l + 1) + ": anchor cost " + sci(tr.anchor_cost) +
                             ", final cost " + sci(tr.final_cost));
        models.push_back(tr.model);
        result.stored.anchors.push_back(tr.anchor);
        result.coils.push_back(std::move(tr));
    }
    result.stored.model = combine_coilsets(std::move(models));
    result.stored.fixed = params;
    return result;
}

std::string to_string(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::original: return "original";
        case StrategyKind::classical: return "classical";
        case StrategyKind::pgnn: return "pgnn";
    }
    return "unknown";
}

StrategyKind parse_strategy(const std::string& name) {
    if (name == "original") return StrategyKind::original;
    if (name == "classical") return StrategyKind::classical;
    if (name == "pgnn") return StrategyKind::pgnn;
    throw ValidationError("unknown strategy '" + name + "' (expected original, classical or pgnn)");
}

CommutationStrategy make_strategy(const ExperimentConfig& cfg, StrategyKind kind, const CommutationParams& params,
                                  const StoredModel* model) {
    if (kind != StrategyKind::pgnn) return classical_strategy(to_string(kind), params, cfg.plant.geometry);
    if (!model) throw ValidationError("pgnn strategy requires an identified model");
    if (model->model.coil_count() != cfg.plant.geometry.coil_count) {
        throw ValidationError("model coil count differs from the configured motor");
    }
    std::optional<CommutationParams> fixed;
    if (cfg.pgnn_via_commands) fixed = model->fixed ? *model->fixed : params;
    return pgnn_strategy(model->model, fixed);
}

EvaluationResult evaluate_strategy(const ExperimentConfig& cfg, const CommutationStrategy& strategy) {
    const ReferenceSamples ref = reference_for(cfg);
    const LoopSetup setup = loop_setup_for(cfg);
    const std::vector<double> no_ff(ref.size(), 0.0);

    const ExperimentLog ff_run = run_closed_loop(strategy, ref, no_ff, setup, derive_seed(cfg.seed, seed_stream::kFeedforward));
    const std::vector<double> commanded = ff_run.commanded_driving_force();
    EvaluationResult result;
    result.strategy = strategy.kind;
    result.feedforward = identify_feedforward_params(ref, commanded);
    result.log = run_closed_loop(strategy, ref, feedforward(ref, result.feedforward), setup,
                                 derive_seed(cfg.seed, seed_stream::kEvaluation));
    result.mse = mse_report(result.log, cfg.lowpass_hz);
    return result;
}

ComparisonResult run_comparison(const ExperimentConfig& cfg, const ProgressSink& progress) {
    cfg.validate();
    ComparisonResult result;
    result.config_hash = config_hash(cfg);

    const std::vector<CoilRuns> data = generate_all(cfg, cfg.initial_params, progress);
    report(progress, "calibrating");
    result.calibration = calibrate_from(cfg, data);
    result.identification = identify_from(cfg, data, cfg.initial_params, progress);

    for (StrategyKind kind : {StrategyKind::original, StrategyKind::classical, StrategyKind::pgnn}) {
        report(progress, "evaluating " + to_string(kind));
        const CommutationParams& params =
            kind == StrategyKind::original ? cfg.initial_params : result.calibration.calibrated;
        result.rows.push_back(evaluate_strategy(cfg, make_strategy(cfg, kind, params, &result.identification.stored)));
    }
    return result;
}

std::string evaluation_json(const ExperimentConfig& cfg, const EvaluationResult& result) {
    json j = evaluation_entry(result);
    j["seed"] = cfg.seed;
    j["config_hash"] = config_hash(cfg);
    j["loop"] = loop_json(cfg);
    return j.dump(2) + "\n";
}

std::string comparison_table(const ComparisonResult& result) {
    std::ostringstream out;
    out << "MSE of the filtered (not filtered) commutation error\n";
    char line[256];
    std::snprintf(line, sizeof line, "%-10s | %-23s | %-23s | %-23s | %s\n", "strategy", "F_y [N^2]", "F_x [N^2]",
                  "T_z [N^2 m^2]", "tracking [m^2]");
    out << line;
    for (const auto& r : result.rows) {
        std::snprintf(line, sizeof line, "%-10s", r.strategy.c_str());
        out << line;
        for (int q = 0; q < 3; ++q) {
            const std::string cell = sci(r.mse.filtered[static_cast<std::size_t>(q)]) + " (" +
                                     sci(r.mse.unfiltered[static_cast<std::size_t>(q)]) + ")";
            std::snprintf(line, sizeof line, " | %-23s", cell.c_str());
            out << line;
        }
        out << " | " << sci(r.mse.tracking) << '\n';
    }
    out << "config hash " << result.config_hash << '\n';
    return out.str();
}

std::string comparison_json(const ExperimentConfig& cfg, const ComparisonResult& result) {
    json rows = json::array();
    for (const auto& r : result.rows) rows.push_back(evaluation_entry(r));
    json coils = json::array();
    for (const auto& tr : result.identification.coils) {
        coils.push_back({{"anchor_cost", tr.anchor_cost},
                         {"initial_cost", tr.initial_cost},
                         {"final_cost", tr.final_cost},
                         {"data_mse", tr.data_mse},
                         {"anchor_data_mse", tr.anchor_data_mse}});
    }
    const json j = {{"config_hash", result.config_hash},
                    {"seed", cfg.seed},
                    {"calibration", json::parse(calibration_to_json(result.calibration, cfg.calibration_delta))},
                    {"identification", coils},
                    {"strategies", rows},
                    {"loop", loop_json(cfg)}};
    return j.dump(2) + "\n";
}

void write_comparison(const ExperimentConfig& cfg, const ComparisonResult& result, const std::filesystem::path& dir) {
    write_text(dir / "calibration.json", calibration_to_json(result.calibration, cfg.calibration_delta));
    write_text(dir / "calibration.csv", calibration_to_csv(result.calibration));
    write_text(dir / "model.json", model_to_json(result.identification.stored));
    write_text(dir / "training_curve.csv", training_curve_csv(result.identification.coils));
    for (const auto& r : result.rows) write_log_csv(r.log, dir / ("log_" + r.strategy + ".csv"), cfg.log_stride);
    write_text(dir / "comparison.txt", comparison_table(result));
    write_text(dir / "comparison.json", comparison_json(cfg, result));
}

}  // namespace clmcomm
