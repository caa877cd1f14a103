#include "nlfront/evolve.hpp"
#include "nlfront/front.hpp"
#include "nlfront/grid.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace nlfront;

namespace {

Kernel poly_kernel(int d) {
    TailParams p;
    p.mu = 1;
    p.d = d;
    return normalize_kernel(build_profile(TailFamily::polynomial, p), d);
}

Field bump(const Grid& g) {
    return sample_field(g, [](double x, double y) { return std::exp(-(x * x + y * y)); });
}

void BM_ConvolveFft1d(benchmark::State& state) {
    const Grid g = make_grid(1, 32, int(state.range(0)));
    Convolver conv(make_stencil(poly_kernel(1), g, true));
    const Field u = bump(g);
    for (auto _ : state) benchmark::DoNotOptimize(conv.apply(u));
}
BENCHMARK(BM_ConvolveFft1d)->RangeMultiplier(4)->Range(64, 1 << 16);

void BM_ConvolveDirect1d(benchmark::State& state) {
    const Grid g = make_grid(1, 32, int(state.range(0)));
    const KernelStencil st = make_stencil(poly_kernel(1), g, true);
    const Field u = bump(g);
    for (auto _ : state) benchmark::DoNotOptimize(convolve_direct(st, u));
}
BENCHMARK(BM_ConvolveDirect1d)->RangeMultiplier(4)->Range(64, 4096);

void BM_ConvolveFft2d(benchmark::State& state) {
    const Grid g = make_grid(2, 16, int(state.range(0)));
    Convolver conv(make_stencil(poly_kernel(2), g, true));
    const Field u = bump(g);
    for (auto _ : state) benchmark::DoNotOptimize(conv.apply(u));
}
BENCHMARK(BM_ConvolveFft2d)->RangeMultiplier(2)->Range(32, 256);

void BM_Rk4Step1d(benchmark::State& state) {
    const ModelParams mp{2.0, 1.0};
    DomainPolicy fixed;
    fixed.expand_threshold = 2.0;
    const Grid g = make_grid(1, 32, int(state.range(0)));
    SimState s = make_state(mp, make_reaction(1.0, 1, LocalReaction::fisher, 1.0, mp.beta()), poly_kernel(1), bump(g),
                            ICClass::integrable, fixed);
    const double dt = dt_max(s);
    for (auto _ : state) advance(s, dt);
}
BENCHMARK(BM_Rk4Step1d)->RangeMultiplier(4)->Range(256, 1 << 16);

void BM_LambertW(benchmark::State& state) {
    double nu = -0.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(lambert_w_minus1(nu));
        nu = nu < -1e-300 ? nu * 0.5 : -0.3;
    }
}
BENCHMARK(BM_LambertW);

}  // namespace

BENCHMARK_MAIN();
