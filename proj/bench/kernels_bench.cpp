// Serial reference vs OpenMP for the data-parallel kernels. Run with
// --benchmark_filter to pick one; the jobs argument is the thread count
// (1 selects the serial loop, 0 the OpenMP default).

#include <benchmark/benchmark.h>

#include "ermip/harness.hpp"
#include "ermip/nets.hpp"
#include "ermip/oracles.hpp"

using namespace ermip;

namespace {

ExecPolicy policy(const benchmark::State& state) {
    const int jobs = static_cast<int>(state.range(0));
    return jobs == 1 ? ExecPolicy::serial() : ExecPolicy::openmp(jobs);
}

void BM_VerifyCovering(benchmark::State& state) {
    const auto net = build_net({2, 2.0, 1.0}, BasisId::fourier(2), 0.1);
    for (auto _ : state) benchmark::DoNotOptimize(verify_covering(net, 2000, 1, policy(state)));
}

void BM_OpNormRho(benchmark::State& state) {
    const auto net = NetSpec::manual({1, 0.1, 1.0}, BasisId::fourier(1), 3, 0.6);
    const auto points = enumerate_net(net, 10000);
    const auto op = DiagonalOperator::convolution(1, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(op_norm_rho(op, points, policy(state)));
}

void BM_PackingExtremes(benchmark::State& state) {
    const auto packing = build_packing({1, 2.0, 1.0}, BasisId::fourier(1), 0.002, 3);
    const auto points = packing.points();
    for (auto _ : state) benchmark::DoNotOptimize(pairwise_extremes(points, policy(state)));
}

void BM_RadonOracle(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(radon_svd_oracle({}, {}, policy(state)));
}

void BM_Sweep(benchmark::State& state) {
    const auto cfg = parse_config(R"([experiment]
name = bench
[operator]
kind = convolution
q = 1
[ellipsoid]
d = 1
s = 2
L = 1
[sweep]
n_grid = 2^8..2^14
replications = 20
)");
    for (auto _ : state) benchmark::DoNotOptimize(run_mise_sweep(cfg, {policy(state)}));
}

}  // namespace

BENCHMARK(BM_VerifyCovering)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OpNormRho)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PackingExtremes)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RadonOracle)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sweep)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
