#include <benchmark/benchmark.h>

#include <nrdot/phonon.hpp>
#include <nrdot/scattering.hpp>
#include <nrdot/transport.hpp>

using namespace nrdot;

namespace {

ThreeDotLeads leads(double V) { return {{"L", V / 2, 0.5}, {"R", -V / 2, 0.5}, {"a", -50.0, 0.5}}; }

void BM_ScatteringThreeDot(benchmark::State& st) {
    const auto dm = assemble_drift(three_dot_circuit({1.0, {0.0, 1.0}, 10.0, 100.0, 1.0, 0.0}));
    double w = 0.0;
    for (auto _ : st) {
        benchmark::DoNotOptimize(scattering_matrix(dm, w));
        w += 1e-3;
    }
}
BENCHMARK(BM_ScatteringThreeDot);

void BM_ClosedFormThreeDot(benchmark::State& st) {
    const ThreeDotParams p{1.0, {0.0, 1.0}, 10.0, 100.0, 1.0, 0.0};
    double w = 0.0;
    for (auto _ : st) {
        benchmark::DoNotOptimize(three_dot_closed_form(p, w));
        w += 1e-3;
    }
}
BENCHMARK(BM_ClosedFormThreeDot);

void BM_CurrentThreeDot(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(current_three_dot({1.0, 10.0, 100.0, 1.0}, leads(20.0)));
}
BENCHMARK(BM_CurrentThreeDot)->Unit(benchmark::kMicrosecond);

void BM_LbThreeDot(benchmark::State& st) {
    const auto spec = three_dot_circuit({1.0, {0.0, 1.0}, 10.0, 100.0, 1.0, 0.0});
    const auto l = leads(20.0);
    for (auto _ : st) benchmark::DoNotOptimize(lb_current(spec, {{"d1", l.left}, {"d2", l.right}, {"a", l.aux}}));
}
BENCHMARK(BM_LbThreeDot)->Unit(benchmark::kMillisecond);

void BM_CorrelationGrid(benchmark::State& st) {
    const OhmicBath b{0.2, 10.0, 0.5};
    for (auto _ : st) benchmark::DoNotOptimize(correlation_B(b, default_tau_max(1.0), static_cast<int>(st.range(0))));
}
BENCHMARK(BM_CorrelationGrid)->Arg(1024)->Arg(8192)->Unit(benchmark::kMillisecond);

void BM_PolaronCurrents(benchmark::State& st) {
    const OhmicBath b{0.2, 10.0, 0.5};
    const auto grid = correlation_B(b, default_tau_max(1.0));
    const auto p = PolaronParams::from_renormalized(1.0, b, 10.0, 100.0, 1.0);
    for (auto _ : st) benchmark::DoNotOptimize(polaron_currents(p, grid, leads(20.0)));
}
BENCHMARK(BM_PolaronCurrents)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
