#include <benchmark/benchmark.h>

#include "fusedstrip/askey_wilson.hpp"
#include "fusedstrip/mpa.hpp"
#include "fusedstrip/strip_model.hpp"

using namespace fusedstrip;

namespace {

ModelParams params(int I) {
    ModelParams p;
    p.I = I;
    p.q = 0.5;
    p.kappa = 0.5;
    p.aa = p.bb = 3.0;
    p.cc = p.dd = 0.05;
    return p;
}

void BM_FusedRComposed(benchmark::State& state) {
    const int I = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto t = fused_R_composed(0.3, 0.5, I);
        benchmark::DoNotOptimize(t);
    }
}
BENCHMARK(BM_FusedRComposed)->Arg(1)->Arg(2)->Arg(3)->Arg(4);

void BM_FusedRExplicit(benchmark::State& state) {
    const int I = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto t = fused_R_explicit(0.3, 0.5, I);
        benchmark::DoNotOptimize(t);
    }
}
BENCHMARK(BM_FusedRExplicit)->Arg(1)->Arg(2)->Arg(3)->Arg(4);

void BM_FusedRComposedRational(benchmark::State& state) {
    const int I = static_cast<int>(state.range(0));
    Rational u = Rational::ratio(1, 4), q = Rational::ratio(1, 2);
    for (auto _ : state) {
        auto t = fused_R_composed(u, q, I);
        benchmark::DoNotOptimize(t);
    }
}
BENCHMARK(BM_FusedRComposedRational)->Arg(2)->Arg(3);

void BM_StepTransitionMatrix(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    auto w = model_weights(params(1));
    auto path = DownRightPath::zigzag(N);
    for (auto _ : state) {
        auto T = step_transition_matrix(path, w);
        benchmark::DoNotOptimize(T);
    }
}
BENCHMARK(BM_StepTransitionMatrix)->Arg(3)->Arg(5)->Arg(8);

void BM_StationaryExact(benchmark::State& state) {
    auto w = model_weights(params(1));
    auto T = step_transition_matrix(DownRightPath::zigzag(static_cast<int>(state.range(0))), w);
    for (auto _ : state) {
        auto mu = stationary_exact(T);
        benchmark::DoNotOptimize(mu);
    }
}
BENCHMARK(BM_StationaryExact)->Arg(5)->Arg(7);

void BM_SampleSweep(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    auto w = model_weights(params(1));
    auto path = DownRightPath::zigzag(N);
    RngStream rng(1);
    Config c;
    c.tau.assign(static_cast<size_t>(N), 0);
    uint64_t step = 0;
    for (auto _ : state) {
        c = sample_step(c, path, w, rng, step++);
        benchmark::DoNotOptimize(c);
    }
}
BENCHMARK(BM_SampleSweep)->Arg(5)->Arg(51)->Arg(501);

void BM_UswRep(benchmark::State& state) {
    auto abcd = abcd_from_rates(dehp_from_boundary(3.0, 3.0, 0.05, 0.05, 0.5));
    for (auto _ : state) {
        auto rep = usw_rep(abcd, static_cast<int>(state.range(0)));
        benchmark::DoNotOptimize(rep);
    }
}
BENCHMARK(BM_UswRep)->Arg(64)->Arg(256);

void BM_LogPartition(benchmark::State& state) {
    PhasePoint pp;
    pp.abcd = abcd_from_rates(dehp_from_boundary(3.0, 3.0, 0.05, 0.05, 0.5));
    pp.kappa = 0.5;
    pp.I = 1;
    const int N = static_cast<int>(state.range(0));
    for (auto _ : state) {
        double z = log_partition(N, N / 2, 1.0, pp);
        benchmark::DoNotOptimize(z);
    }
}
BENCHMARK(BM_LogPartition)->Arg(250)->Arg(2000);

void BM_AWExpectMass(benchmark::State& state) {
    auto m = aw_measure(AWParams::all_real(0.5, -0.2, 0.4, -0.1, 0.5));
    for (auto _ : state) {
        double v = total_mass(m);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_AWExpectMass);

}  // namespace

BENCHMARK_MAIN();
