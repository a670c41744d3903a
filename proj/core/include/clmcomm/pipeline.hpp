#pragma once

// Experiment protocol shared by the command-line tool and the end-to-end tests.

#include "clmcomm/closed_loop.hpp"
#include "clmcomm/config.hpp"
#include "clmcomm/metrics.hpp"
#include "clmcomm/pgnn_training.hpp"
#include "clmcomm/serialization.hpp"

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace clmcomm {

/// Seed streams; every random draw of an experiment derives from config seed + stream.
namespace seed_stream {
inline constexpr std::uint64_t kData = 100;        ///< + 10 coil + run
inline constexpr std::uint64_t kTraining = 200;    ///< + coil
inline constexpr std::uint64_t kFeedforward = 300;
inline constexpr std::uint64_t kEvaluation = 400;
}  // namespace seed_stream

using ProgressSink = std::function<void(const std::string&)>;

ReferenceSamples reference_for(const ExperimentConfig& cfg);
LoopSetup loop_setup_for(const ExperimentConfig& cfg);

using CoilRuns = std::array<DataSetZ, 2>;

/// Run i in {1, 2} of coil set `coil` (zero-based), excited with the given estimates.
DataSetZ generate_run(const ExperimentConfig& cfg, const CommutationParams& params, int coil, int run);
std::vector<CoilRuns> generate_all(const ExperimentConfig& cfg, const CommutationParams& params,
                                   const ProgressSink& progress = {});

CalibrationResult calibrate_from(const ExperimentConfig& cfg, const std::vector<CoilRuns>& data);

struct IdentificationResult {
    StoredModel stored;
    std::vector<TrainingResult> coils;
};

/// Trains one model per coil set. `params` is the commutation the data was generated with.
IdentificationResult identify_from(const ExperimentConfig& cfg, const std::vector<CoilRuns>& data,
                                   const CommutationParams& params, const ProgressSink& progress = {});

enum class StrategyKind { original, classical, pgnn };
std::string to_string(StrategyKind kind);
StrategyKind parse_strategy(const std::string& name);

struct EvaluationResult {
    std::string strategy;
    FeedforwardParams feedforward;
    ExperimentLog log;
    MseReport mse;
};

/// Closed-loop run without feedforward, feedforward identification on it, then the
/// evaluation run with that feedforward. Both runs use fixed seed streams, so every
/// strategy sees the same noise realisation.
EvaluationResult evaluate_strategy(const ExperimentConfig& cfg, const CommutationStrategy& strategy);

CommutationStrategy make_strategy(const ExperimentConfig& cfg, StrategyKind kind, const CommutationParams& params,
                                  const StoredModel* model = nullptr);

struct ComparisonResult {
    std::string config_hash;
    CalibrationResult calibration;
    IdentificationResult identification;
    std::vector<EvaluationResult> rows;  ///< original, classical, pgnn
};

ComparisonResult run_comparison(const ExperimentConfig& cfg, const ProgressSink& progress = {});

/// Report JSON of a single evaluation.
std::string evaluation_json(const ExperimentConfig& cfg, const EvaluationResult& result);
/// Human-readable table: one row per strategy, filtered (unfiltered) MSE per axis and tracking MSE.
std::string comparison_table(const ComparisonResult& result);
std::string comparison_json(const ExperimentConfig& cfg, const ComparisonResult& result);
/// Writes calibration, model, curves, logs and reports below `dir`.
void write_comparison(const ExperimentConfig& cfg, const ComparisonResult& result, const std::filesystem::path& dir);

}  // namespace clmcomm
