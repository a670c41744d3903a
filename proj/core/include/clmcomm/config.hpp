#pragma once

#include "clmcomm/classical_commutation.hpp"
#include "clmcomm/mechanics.hpp"
#include "clmcomm/motor_plant.hpp"
#include "clmcomm/pgnn_training.hpp"
#include "clmcomm/trajectory.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace clmcomm {

/// Moves from start to end and back once per listed peak velocity.
struct ReferenceConfig {
    double start = -0.1;                            ///< [m]
    double end = 0.1;                               ///< [m]
    std::vector<double> v_max{0.025, 0.075, 0.15};  ///< [m/s]
    double a_max = 1.0;                             ///< [m/s^2]
    double j_max = 1000.0;                          ///< [m/s^3]
    double dwell = 0.2;                             ///< [s]

    std::vector<TrajectorySpec> moves() const;
};

struct ExperimentConfig {
    MotorTruth plant;
    CommutationParams initial_params;   ///< estimates the drive starts from
    double calibration_delta = kPi / 4.0;
    TrainingHyperparams training;
    bool pgnn_via_commands = false;     ///< route PGNN currents through the fixed commutation
    MechConfig mech;
    double feedback_bandwidth = 50.0;   ///< [Hz], used when no explicit gains are given
    std::optional<PidGains> pid;
    ReferenceConfig reference;
    std::uint64_t seed = 1;
    double lowpass_hz = 50.0;
    std::size_t log_stride = 1;         ///< write every n-th sample to log CSV files
    double guard_margin = 0.05;         ///< [m]

    void validate() const;
    PidGains feedback_gains() const;
};

/// Built-in configuration: three coil sets, initial estimates k = 67 N/A and
/// zeta = -0.52 rad, a parasitic plant, and the three-speed reference.
ExperimentConfig default_config();

/// Parses and validates a JSON configuration. Absent keys keep their defaults from
/// default_config(); unknown keys are rejected.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& json_text);

/// Canonical JSON of the full configuration (sorted keys, all fields present).
std::string config_to_json(const ExperimentConfig& cfg);

/// 64-bit FNV-1a over the canonical JSON, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

/// Deterministic per-purpose seed derived from the experiment seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace clmcomm
