#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "optomech/classical.hpp"
#include "optomech/gaussian.hpp"
#include "optomech/linear.hpp"
#include "optomech/sync.hpp"

namespace {

using namespace optomech;

SystemParams working_point(BathKind bath) {
    SystemParams p;
    p.omega_m1 = p.omega_m2 = 3.0;
    p.damping = 3e-5;
    p.coupling = 9.0;
    p.detuning = -3.0;
    p.power = 12.0;
    p.n_th = 9.508;
    p.bath = bath;
    return p;
}

void BM_LyapunovSchur(benchmark::State& state) {
    const SystemParams p = working_point(BathKind::Common);
    const FixedPoint fp = find_fixed_points(p)[0];
    const Matrix8 m = canonical_drift(p, fp);
    const Matrix8 n = canonical_noise(p);
    for (auto _ : state) benchmark::DoNotOptimize(lyapunov_steady(m, n));
}
BENCHMARK(BM_LyapunovSchur);

void BM_LyapunovKronecker(benchmark::State& state) {
    const SystemParams p = working_point(BathKind::Common);
    const FixedPoint fp = find_fixed_points(p)[0];
    const Matrix8 m = canonical_drift(p, fp);
    const Matrix8 n = canonical_noise(p);
    for (auto _ : state) benchmark::DoNotOptimize(lyapunov_kronecker(m, n));
}
BENCHMARK(BM_LyapunovKronecker);

void BM_SteadyStateAnalysis(benchmark::State& state) {
    const SystemParams p = working_point(BathKind::Separate);
    for (auto _ : state) benchmark::DoNotOptimize(analyze_steady_state(p));
}
BENCHMARK(BM_SteadyStateAnalysis);

void BM_Integrate(benchmark::State& state) {
    SystemParams p;
    p.power = 0.36;
    p.detuning = 1.0;
    p.damping = 0.01;
    p.coupling = 0.05;
    const double t_end = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(integrate(default_initial_state(), p, t_end, 0.05));
}
BENCHMARK(BM_Integrate)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_DelayScan(benchmark::State& state) {
    const double dt = 0.05;
    std::vector<double> x1(12000), x2(12000);
    for (std::size_t i = 0; i < x1.size(); ++i) {
        const double t = static_cast<double>(i) * dt;
        x1[i] = std::sin(t);
        x2[i] = 0.8 * std::sin(t - 2.0);
    }
    for (auto _ : state) benchmark::DoNotOptimize(delay_scan(x1, x2, dt));
}
BENCHMARK(BM_DelayScan)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
