// Commutation latency and training cost on desk-scale shapes.

#include "clmcomm/classical_commutation.hpp"
#include "clmcomm/pgnn_commutation.hpp"
#include "clmcomm/pipeline.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace clmcomm;

namespace {

ExperimentConfig desk() { return load_config(CLMCOMM_DESK_CONFIG); }

PgnnFullModel random_full_model(const TrainingHyperparams& hp, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<PgnnCoilModel> coils;
    for (int l = 0; l < 3; ++l) {
        PgnnCoilModel m = PgnnCoilModel::zeros(hp.gain_hidden, hp.cogging_hidden, 0.024, {0.0, 0.1});
        m.set_physical_parameters(ideal_physical_parameters(61.0, -0.54, 0.1, 0.06 * (l - 1)));
        m.gain_a = Mlp::random(m.gain_a.widths(), hp.gain_init_scale, rng);
        m.gain_b = Mlp::random(m.gain_b.widths(), hp.gain_init_scale, rng);
        m.cogging = Mlp::random(m.cogging.widths(), hp.cogging_init_scale, rng);
        coils.push_back(std::move(m));
    }
    return combine_coilsets(std::move(coils));
}

void BM_pgnn_commutate(benchmark::State& state) {
    const ExperimentConfig cfg = desk();
    const PgnnFullModel model = random_full_model(cfg.training, 1);
    double y = -0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(pgnn_commutate({25.0, 0.5, 0.01}, y, model));
        y = y > 0.1 ? -0.1 : y + 1e-4;
    }
}
BENCHMARK(BM_pgnn_commutate)->Unit(benchmark::kMicrosecond);

void BM_classical_commutate(benchmark::State& state) {
    const ExperimentConfig cfg = desk();
    double y = -0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(classical_currents({25.0, 0.0, 0.0}, y, cfg.initial_params, cfg.plant.geometry));
        y = y > 0.1 ? -0.1 : y + 1e-4;
    }
}
BENCHMARK(BM_classical_commutate)->Unit(benchmark::kMicrosecond);

struct TrainingFixture {
    ExperimentConfig cfg = desk();
    IdentificationSet data;
    PgnnCoilModel model;
    RegularizationSpec reg;

    TrainingFixture() {
        const DataSetZ minus = generate_run(cfg, cfg.initial_params, 0, 1);
        const DataSetZ plus = generate_run(cfg, cfg.initial_params, 0, 2);
        data = make_identification_set(minus.decimated(cfg.training.decimation), plus.decimated(cfg.training.decimation),
                                       cfg.initial_params.fixed(0, cfg.plant.geometry.pole_pitch));
        model = random_full_model(cfg.training, 2).coils.front();
        reg = RegularizationSpec::uniform(cfg.training.lambda, fit_physical_anchor(data, cfg.plant.geometry.pole_pitch));
    }
};

const TrainingFixture& fixture() {
    static const TrainingFixture f;
    return f;
}

// One full-batch epoch: cost gradient over all records of a coil set.
void BM_training_epoch(benchmark::State& state) {
    const TrainingFixture& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(cost_gradient(f.model, f.data, f.reg));
    state.counters["records"] = static_cast<double>(f.data.size());
}
BENCHMARK(BM_training_epoch)->Unit(benchmark::kMillisecond);

void BM_least_squares(benchmark::State& state) {
    const TrainingFixture& f = fixture();
    for (auto _ : state) {
        PgnnCoilModel m = f.model;
        least_squares_linear(m, f.data, f.reg);
        benchmark::DoNotOptimize(m);
    }
}
BENCHMARK(BM_least_squares)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
