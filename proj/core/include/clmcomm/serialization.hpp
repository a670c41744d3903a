#pragma once

#include "clmcomm/classical_commutation.hpp"
#include "clmcomm/closed_loop.hpp"
#include "clmcomm/pgnn.hpp"
#include "clmcomm/pgnn_training.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace clmcomm {

inline constexpr int kModelFormatVersion = 1;

/// Identified model as stored on disk. Anchors may be empty.
struct StoredModel {
    PgnnFullModel model;
    std::vector<Eigen::VectorXd> anchors;
    std::optional<CommutationParams> fixed;  ///< commutation the data was generated with
};

/// Versioned JSON. Network weights are nested row-major arrays.
std::string model_to_json(const StoredModel& stored);
StoredModel parse_model_json(const std::string& text);
StoredModel load_model(const std::filesystem::path& path);

/// Single coil set, same layout as one entry of the full model.
std::string coil_model_to_json(const PgnnCoilModel& model, const Eigen::VectorXd& anchor);
PgnnCoilModel parse_coil_model_json(const std::string& text, Eigen::VectorXd* anchor = nullptr);

std::string params_to_json(const CommutationParams& params);
/// Accepts either a bare {k_hat, zeta_hat} object or a calibration report (uses "calibrated").
CommutationParams parse_params_json(const std::string& text);
CommutationParams load_params(const std::filesystem::path& path);

/// Initial and calibrated values per coil set, plus the fitted coefficients.
std::string calibration_to_json(const CalibrationResult& result, double delta);
std::string calibration_to_csv(const CalibrationResult& result);

/// Curve of every coil set: coil,epoch,cost,least_squares.
std::string training_curve_csv(const std::vector<TrainingResult>& results);

/// One row per `stride`-th sample; the header row names every column.
void write_log_csv(const ExperimentLog& log, const std::filesystem::path& path, std::size_t stride = 1);

std::string read_text(const std::filesystem::path& path);
/// Creates missing parent directories.
void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace clmcomm
