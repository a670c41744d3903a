#pragma once

#include "clmcomm/classical_commutation.hpp"
#include "clmcomm/dataset.hpp"
#include "clmcomm/mechanics.hpp"
#include "clmcomm/motor_plant.hpp"
#include "clmcomm/pgnn.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace clmcomm {

struct CommutationOutput {
    std::vector<CurrentTriple> currents;
    std::vector<MagnitudePhaseCommand> commands;  ///< empty when currents are prescribed directly
};

/// Maps a desired force at a position to phase currents.
struct CommutationStrategy {
    std::string kind;
    std::function<CommutationOutput(const ForceVector& f_star, double y)> law;
};

CommutationStrategy classical_strategy(std::string kind, CommutationParams params, MotorGeometry geom);

/// PGNN commutation. With `fixed` set, the currents are converted to magnitude/phase
/// commands and the applied currents are those the fixed sinusoidal commutation produces.
CommutationStrategy pgnn_strategy(PgnnFullModel model, std::optional<CommutationParams> fixed = std::nullopt);

/// Identification excitation: only `coil` is active, carrying the full driving force,
/// with its commutation phase shifted by `phase_offset`.
CommutationStrategy excitation_strategy(CommutationParams params, MotorGeometry geom, int coil, double phase_offset);

struct ExperimentLog {
    std::string commutation;
    std::uint64_t seed = 0;
    double sample_rate = 0.0;
    std::vector<double> t;
    std::vector<double> y_ref;
    std::vector<double> y;
    std::vector<double> error;
    std::vector<double> u_ff;
    std::vector<double> u_fb;
    std::vector<ForceVector> f_star;
    std::vector<ForceVector> f_measured;
    std::vector<std::vector<CurrentTriple>> currents;
    std::vector<std::vector<MagnitudePhaseCommand>> commands;

    std::size_t size() const { return t.size(); }
    /// Commanded driving force F_y* per sample.
    std::vector<double> commanded_driving_force() const;
};

/// Closed-loop run stopped by the divergence guard; carries the samples logged so far.
class DivergenceError : public NumericalError {
public:
    DivergenceError(const std::string& what, ExperimentLog partial)
        : NumericalError(what), partial_(std::move(partial)) {}
    const ExperimentLog& partial_log() const { return partial_; }

private:
    ExperimentLog partial_;
};

struct LoopSetup {
    MotorTruth plant;
    MechConfig mech;
    PidGains pid;
    double guard_margin = 0.05;  ///< abort when |y| exceeds max |y*| by this much [m]
};

/// Runs the position loop over the reference: e = y* - y, F* = [u_ff + u_fb, 0, 0],
/// commutation, plant force (with measurement noise seeded by `seed`), mechanics.
ExperimentLog run_closed_loop(const CommutationStrategy& commutation, const ReferenceSamples& reference,
                              const std::vector<double>& u_ff, const LoopSetup& setup, std::uint64_t seed);

/// Identification data of one coil set for run i in {1, 2}: phase offset (-1)^i delta,
/// no feedforward, only that coil set active.
DataSetZ generate_dataset(int coil, int run, double delta, const ReferenceSamples& reference,
                          const CommutationParams& params, const LoopSetup& setup, std::uint64_t seed);

}  // namespace clmcomm
