#include <benchmark/benchmark.h>

#include <numbers>

#include "cubicgen/circuit.hpp"
#include "cubicgen/matrix_exp.hpp"
#include "cubicgen/optimizer.hpp"
#include "cubicgen/states.hpp"
#include "cubicgen/wigner.hpp"

using namespace cubicgen;

namespace {

ParamVector balanced_optimum() {
    constexpr double pi = std::numbers::pi;
    return ParamVector({-0.2202, pi / 4.0, 1.5 * pi, 0.1293, pi, 0.1814, 0.5 * pi});
}

// Displacement generator on a single mode, the dense Pade workload.
void BM_MatrixExpDisplacement(benchmark::State& state) {
    const int cutoff = static_cast<int>(state.range(0));
    const ComplexMatrix a = ladder_matrix(cutoff);
    const ComplexMatrix gen = Complex(0.8, 0.3) * a.adjoint() - Complex(0.8, -0.3) * a;
    for (auto _ : state) benchmark::DoNotOptimize(matrix_exp(gen));
}
BENCHMARK(BM_MatrixExpDisplacement)->Arg(30)->Arg(60)->Arg(130);

void BM_LossAndGrad(benchmark::State& state) {
    const Problem problem(TargetSpec{}, static_cast<int>(state.range(0)));
    const ParamVector x = balanced_optimum();
    for (auto _ : state) benchmark::DoNotOptimize(problem.loss_and_grad(x));
}
BENCHMARK(BM_LossAndGrad)->Arg(20)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_HeraldedOutput(benchmark::State& state) {
    const FockSpace space = FockSpace::two_mode(static_cast<int>(state.range(0)));
    const ParamVector x = balanced_optimum();
    for (auto _ : state) benchmark::DoNotOptimize(heralded_output(x, space));
}
BENCHMARK(BM_HeraldedOutput)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_TargetState(benchmark::State& state) {
    const FockSpace space = FockSpace::single(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(cubic_phase_target(0.15, 5.0, space));
}
BENCHMARK(BM_TargetState)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_WignerGrid(benchmark::State& state) {
    const StateVector target = cubic_phase_target(0.15, 5.0, FockSpace::single(30)).state;
    const auto axis = linspace(-5.0, 5.0, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(wigner(target, axis, axis));
}
BENCHMARK(BM_WignerGrid)->Arg(51)->Arg(201)->Unit(benchmark::kMillisecond);

void BM_MinimizeFromOptimum(benchmark::State& state) {
    const Problem problem(TargetSpec{}, 30);
    OptConfig config;
    config.fix_transmission(0.5);
    config.check_cutoff = false;
    for (auto _ : state) benchmark::DoNotOptimize(minimize(balanced_optimum(), problem, config));
}
BENCHMARK(BM_MinimizeFromOptimum)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
