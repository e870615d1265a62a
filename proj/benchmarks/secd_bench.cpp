// Micro benchmarks of the pipeline hot spots.

#include <benchmark/benchmark.h>

#include "secd/branch_and_bound.hpp"
#include "secd/datagen.hpp"
#include "secd/lp_simplex.hpp"
#include "secd/mps.hpp"
#include "secd/neuron_bounds.hpp"
#include "secd/p2_builder.hpp"
#include "secd/scenario.hpp"
#include "secd/surrogate.hpp"

using namespace secd;

namespace {

const Network& feeder() {
    static const Network net = ieee33();
    return net;
}

// Classifier whose normalization spans the sampling box.
MlpModel bench_model() {
    MlpModel m = MlpModel::random({99, 8, 8, 2}, 3);
    m.input_offset = Eigen::VectorXd::Zero(99);
    m.input_scale = Eigen::VectorXd::Constant(99, 1.0 / 3.0);
    for (auto& b : m.biases) b.setConstant(0.05);
    m.biases.back() << -1.0, 1.0;
    return m;
}

LrModel bench_lr() { return LrModel{Eigen::VectorXd::Constant(99, 0.001), 0.01}; }

Scenario bench_scenario(std::size_t horizon) {
    ScenarioConfig c;
    c.horizon = horizon;
    c.load_profile.assign(horizon, 0.8);
    return make_scenario(feeder(), c, 1.0, "bench");
}

void BM_PowerFlowSweep(benchmark::State& state) {
    const InjectionProfile inj = InjectionProfile::nominal(feeder(), 1.4);
    for (auto _ : state) benchmark::DoNotOptimize(solve_power_flow(feeder(), inj));
}
BENCHMARK(BM_PowerFlowSweep);

void BM_SampleAndLabel(benchmark::State& state) {
    SamplingConfig cfg;
    std::uint64_t i = 0;
    for (auto _ : state) {
        SplitMix64 rng(sample_seed(1, i++));
        benchmark::DoNotOptimize(label(feeder(), sample_operation_vector(rng, feeder(), cfg), SecurityLimits{}));
    }
}
BENCHMARK(BM_SampleAndLabel);

void BM_GenerateDataset(benchmark::State& state) {
    GenerateOptions o;
    o.workers = static_cast<unsigned>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(generate(feeder(), SecurityLimits{}, 2000, 0.6, 7, o));
}
BENCHMARK(BM_GenerateDataset)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_BatchGradient(benchmark::State& state) {
    const MlpModel m = bench_model();
    const Eigen::MatrixXd x = Eigen::MatrixXd::Random(99, 64).cwiseAbs();
    std::vector<int> cls(64);
    for (int i = 0; i < 64; ++i) cls[i] = i % 2;
    Gradients g;
    for (auto _ : state) benchmark::DoNotOptimize(batch_loss(m, x, cls, &g));
}
BENCHMARK(BM_BatchGradient);

void BM_PropagateBounds(benchmark::State& state) {
    const MlpModel m = bench_model();
    const Eigen::VectorXd lo = Eigen::VectorXd::Zero(99), hi = Eigen::VectorXd::Constant(99, 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(propagate_bounds(m, lo, hi));
}
BENCHMARK(BM_PropagateBounds);

void BM_BuildP2(benchmark::State& state) {
    const Scenario s = bench_scenario(24);
    const MlpModel m = bench_model();
    P2Options o;
    for (auto _ : state) benchmark::DoNotOptimize(build_p2(s, &m, bench_lr(), o));
}
BENCHMARK(BM_BuildP2)->Unit(benchmark::kMillisecond);

void BM_RootRelaxation(benchmark::State& state) {
    const Scenario s = bench_scenario(static_cast<std::size_t>(state.range(0)));
    const MlpModel m = bench_model();
    const P2Instance inst = build_p2(s, &m, bench_lr(), P2Options{});
    for (auto _ : state) {
        BoundedSimplex lp(inst.problem);
        benchmark::DoNotOptimize(lp.solve());
    }
}
BENCHMARK(BM_RootRelaxation)->Arg(4)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_SolveP2(benchmark::State& state) {
    const Scenario s = bench_scenario(static_cast<std::size_t>(state.range(0)));
    const MlpModel m = bench_model();
    const P2Instance inst = build_p2(s, &m, bench_lr(), P2Options{});
    SolveOptions o;
    o.node_limit = 50;
    for (auto _ : state) benchmark::DoNotOptimize(solve(inst.problem, o));
}
BENCHMARK(BM_SolveP2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_WriteMps(benchmark::State& state) {
    const Scenario s = bench_scenario(24);
    const MlpModel m = bench_model();
    const P2Instance inst = build_p2(s, &m, bench_lr(), P2Options{});
    for (auto _ : state) benchmark::DoNotOptimize(to_mps(inst.problem));
}
BENCHMARK(BM_WriteMps)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
