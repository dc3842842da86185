#include <benchmark/benchmark.h>

#include "imc/controller.hpp"
#include "imc/design.hpp"
#include "imc/engine.hpp"
#include "imc/linalg.hpp"
#include "imc/noise.hpp"
#include "imc/refcase.hpp"

#include <Eigen/Dense>

namespace {

void BM_SolveP(benchmark::State& state) {
    const imc::ChainSpec spec{static_cast<int>(state.range(0))};
    // Feasible (c1, c3) pairs per order; the decay inequality tightens with n.
    const double c1 = spec.order == 2 ? 20.0 : 6.0;
    const double c3 = spec.order == 2 ? 3.0 : 6.0;
    for (auto _ : state) {
        auto sol = imc::solve_P(spec, c1, c3);
        benchmark::DoNotOptimize(sol.P);
    }
}
BENCHMARK(BM_SolveP)->Arg(2)->Arg(3)->Arg(4);

void BM_JacobiEigen(benchmark::State& state) {
    const auto n = static_cast<int>(state.range(0));
    Eigen::MatrixXd m = Eigen::MatrixXd::Random(n, n);
    m = (0.5 * (m + m.transpose())).eval();
    for (auto _ : state) {
        auto sys = imc::linalg::jacobi_eigen(m);
        benchmark::DoNotOptimize(sys.values);
    }
}
BENCHMARK(BM_JacobiEigen)->Arg(4)->Arg(16)->Arg(64);

void BM_RbfBasis(benchmark::State& state) {
    const auto dim = static_cast<int>(state.range(0));
    const imc::RbfLattice lat(dim, 5, -3.0, 3.0);
    Eigen::VectorXd in = Eigen::VectorXd::Constant(dim, 0.37);
    for (auto _ : state) {
        auto phi = lat.basis(in);
        benchmark::DoNotOptimize(phi);
    }
}
BENCHMARK(BM_RbfBasis)->Arg(3)->Arg(5);

void BM_NoiseStep(benchmark::State& state) {
    imc::NoiseProcess proc(imc::NoiseParams{}, 1);
    for (auto _ : state) benchmark::DoNotOptimize(proc.step(1e-3));
}
BENCHMARK(BM_NoiseStep);

void BM_ClosedLoopSecond(benchmark::State& state) {
    imc::SimConfig cfg;
    cfg.horizon = 1.0;
    const imc::Prepared prep = imc::prepare(cfg);
    const imc::RunSeeds seeds = imc::seeds_for_run(cfg, 0);
    for (auto _ : state) {
        auto trace = imc::run(cfg, prep, seeds);
        benchmark::DoNotOptimize(trace.x);
    }
}
BENCHMARK(BM_ClosedLoopSecond)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
