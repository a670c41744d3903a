#include "clmcomm/closed_loop.hpp"

#include "clmcomm/pgnn_commutation.hpp"

#include <algorithm>
#include <sstream>

namespace clmcomm {

CommutationStrategy classical_strategy(std::string kind, CommutationParams params, MotorGeometry geom) {
    params.validate(geom.coil_count);
    return {std::move(kind), [params = std::move(params), geom = std::move(geom)](const ForceVector& f, double y) {
                return CommutationOutput{classical_currents(f, y, params, geom), {}};
            }};
}

CommutationStrategy pgnn_strategy(PgnnFullModel model, std::optional<CommutationParams> fixed) {
    model.validate();
    if (!fixed) {
        return {"pgnn", [model = std::move(model)](const ForceVector& f, double y) {
                    return CommutationOutput{pgnn_commutate(f, y, model).currents, {}};
                }};
    }
    fixed->validate(model.coil_count());
    return {"pgnn", [model = std::move(model), fixed = *fixed](const ForceVector& f, double y) {
                CommutationSolution sol = pgnn_commutate_commands(f, y, model, fixed);
                const double pitch = model.coils.front().pole_pitch;
                CommutationOutput out;
                for (std::size_t l = 0; l < sol.commands.size(); ++l) {
                    out.currents.push_back(
                        expand_star(command_to_currents(sol.commands[l], y, fixed.fixed(static_cast<int>(l), pitch))));
                }
                out.commands = std::move(sol.commands);
                return out;
            }};
}

CommutationStrategy excitation_strategy(CommutationParams params, MotorGeometry geom, int coil, double phase_offset) {
    params.validate(geom.coil_count);
    if (coil < 0 || coil >= geom.coil_count) throw ValidationError("excitation: coil index out of range");
    return {"excitation", [params = std::move(params), geom = std::move(geom), coil, phase_offset](
                              const ForceVector& f, double y) {
                CommutationOutput out;
                out.currents.assign(static_cast<std::size_t>(geom.coil_count), CurrentTriple{});
                const auto l = static_cast<std::size_t>(coil);
                out.currents[l] =
                    sinusoidal_currents(f.fy, params.k_hat[l], geom.electrical_angle(y) + params.zeta_hat[l] + phase_offset);
                return out;
            }};
}

std::vector<double> ExperimentLog::commanded_driving_force() const {
    std::vector<double> out;
    out.reserve(f_star.size());
    for (const auto& f : f_star) out.push_back(f.fy);
    return out;
}

ExperimentLog run_closed_loop(const CommutationStrategy& commutation, const ReferenceSamples& reference,
                              const std::vector<double>& u_ff, const LoopSetup& setup, std::uint64_t seed) {
    setup.plant.validate();
    setup.mech.validate();
    if (reference.size() == 0) throw ValidationError("closed loop: empty reference");
    if (u_ff.size() != reference.size()) throw ValidationError("closed loop: feedforward length differs from reference");

    double stroke = 0.0;
    for (double p : reference.position) stroke = std::max(stroke, std::abs(p));
    const double limit = stroke + setup.guard_margin;

    const std::size_t n = reference.size();
    ExperimentLog log;
    log.commutation = commutation.kind;
    log.seed = seed;
    log.sample_rate = setup.mech.sample_rate;
    for (auto* v : {&log.t, &log.y_ref, &log.y, &log.error, &log.u_ff, &log.u_fb}) v->reserve(n);
    log.f_star.reserve(n);
    log.f_measured.reserve(n);
    log.currents.reserve(n);

    MeasurementNoise noise(setup.plant.parasitics.noise_std, seed);
    const bool noisy = setup.plant.parasitics.noise_enabled();
    PidController pid(setup.pid, setup.mech.sample_rate);
    MechState state{reference.position.front(), 0.0};

    for (std::size_t k = 0; k < n; ++k) {
        if (!(std::abs(state.y) <= limit)) {
            std::ostringstream msg;
            msg << "closed loop diverged at sample " << k << ": |y| = " << std::abs(state.y) << " m exceeds " << limit
                << " m";
            throw DivergenceError(msg.str(), std::move(log));
        }
        const double e = reference.position[k] - state.y;
        const double fb = pid.update(e);
        const ForceVector f_star{u_ff[k] + fb, 0.0, 0.0};
        CommutationOutput out = commutation.law(f_star, state.y);
        const ForceVector f_true = plant_force(out.currents, state.y, setup.plant);
        const ForceVector f_meas = noisy ? f_true + noise.sample() : f_true;

        log.t.push_back(static_cast<double>(k) / setup.mech.sample_rate);
        log.y_ref.push_back(reference.position[k]);
        log.y.push_back(state.y);
        log.error.push_back(e);
        log.u_ff.push_back(u_ff[k]);
        log.u_fb.push_back(fb);
        log.f_star.push_back(f_star);
        log.f_measured.push_back(f_meas);
        log.currents.push_back(std::move(out.currents));
        if (!out.commands.empty()) log.commands.push_back(std::move(out.commands));

        state = step_mechanics(state, f_true.fy, setup.mech);
    }
    return log;
}

DataSetZ generate_dataset(int coil, int run, double delta, const ReferenceSamples& reference,
                          const CommutationParams& params, const LoopSetup& setup, std::uint64_t seed) {
    validate_calibration_delta(delta);
    if (run != 1 && run != 2) throw ValidationError("data generation: run must be 1 or 2");
    const double offset = run == 1 ? -delta : delta;
    const auto strategy = excitation_strategy(params, setup.plant.geometry, coil, offset);
    const std::vector<double> no_ff(reference.size(), 0.0);
    const ExperimentLog log = run_closed_loop(strategy, reference, no_ff, setup, seed);

    DataSetZ data{coil, offset, {}};
    data.records.reserve(log.size());
    for (std::size_t k = 0; k < log.size(); ++k) data.records.push_back({log.y[k], log.f_measured[k], log.f_star[k].fy});
    return data;
}

}  // namespace clmcomm
