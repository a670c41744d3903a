#include "clmcomm/pgnn_commutation.hpp"

#include "clmcomm/allocation.hpp"

namespace clmcomm {

CommutationSolution pgnn_commutate(const ForceVector& f_star, double y, const PgnnFullModel& model) {
    const ForceVector cog = model.mean_cogging(y);
    const StackedGain gain = model.stacked_gain(y);
    CommutationSolution sol;
    sol.currents = min_norm_allocation(gain, (f_star - cog).vec(), y);
    sol.predicted_force = ForceVector::from(gain * stack_pairs(sol.currents)) + cog;
    sol.norm = current_norm(sol.currents);
    return sol;
}

CommutationSolution pgnn_commutate_commands(const ForceVector& f_star, double y, const PgnnFullModel& model,
                                            const CommutationParams& fixed_params) {
    fixed_params.validate(model.coil_count());
    CommutationSolution sol = pgnn_commutate(f_star, y, model);
    const double pitch = model.coils.front().pole_pitch;
    sol.commands.reserve(sol.currents.size());
    for (std::size_t l = 0; l < sol.currents.size(); ++l) {
        sol.commands.push_back(currents_to_command(reduce_star(sol.currents[l]), y,
                                                   fixed_params.fixed(static_cast<int>(l), pitch)));
    }
    return sol;
}

}  // namespace clmcomm
