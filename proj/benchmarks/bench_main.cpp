#include <benchmark/benchmark.h>

#include "blockspec/eta.hpp"
#include "blockspec/mcsim.hpp"
#include "blockspec/oracle.hpp"
#include "blockspec/presets.hpp"
#include "blockspec/solver.hpp"
#include "blockspec/wishart.hpp"
#include "support/oracles.hpp"

using namespace blockspec;

namespace {

void BM_EtaApplyToeplitz(benchmark::State& state) {
    auto spec = *preset("toeplitz5").model;
    EtaMap eta = eta_for(spec);
    Matrix D = Matrix::Identity(5, 5);
    for (auto _ : state) {
        D = eta.apply(D);
        benchmark::DoNotOptimize(D.data());
        D /= max_abs(D);
    }
}
BENCHMARK(BM_EtaApplyToeplitz);

void BM_EtaApplyChannel(benchmark::State& state) {
    auto emb = build_wishart_embedding(*preset("mimo:4,4,1").wishart);
    EtaMap eta = eta_for(emb);
    Matrix D = Matrix::Identity(11, 11);
    for (auto _ : state) {
        D = eta.apply(D);
        benchmark::DoNotOptimize(D.data());
        D /= max_abs(D);
    }
}
BENCHMARK(BM_EtaApplyChannel);

void BM_DetectPattern(benchmark::State& state) {
    auto emb = build_wishart_embedding(*preset("mimo:4,4,1").wishart);
    EtaMap eta = eta_for(emb);
    for (auto _ : state) {
        auto mask = detect_pattern(eta);
        benchmark::DoNotOptimize(mask.classes.size());
    }
}
BENCHMARK(BM_DetectPattern);

void BM_SolvePointDescent(benchmark::State& state) {
    auto spec = *preset("toeplitz3").model;
    for (auto _ : state) {
        auto sol = solve_point(spec, Complex(0.5, 1e-6));
        benchmark::DoNotOptimize(sol.residual);
    }
}
BENCHMARK(BM_SolvePointDescent);

void BM_SweepToeplitz(benchmark::State& state) {
    auto spec = *preset("toeplitz3").model;
    std::vector<double> xs;
    for (double x = -3.3; x <= 3.3; x += 6.6 / 1199.0) xs.push_back(x);
    for (auto _ : state) {
        auto grid = solve_grid(spec, xs, 1e-6);
        benchmark::DoNotOptimize(grid.points.size());
    }
}
BENCHMARK(BM_SweepToeplitz)->Unit(benchmark::kMillisecond);

void BM_WishartPoint(benchmark::State& state) {
    auto w = *preset("mimo:4,4,1").wishart;
    for (auto _ : state) {
        auto sol = solve_wishart_point(w, Complex(0.5, 1e-6));
        benchmark::DoNotOptimize(sol.residual);
    }
}
BENCHMARK(BM_WishartPoint);

void BM_EnumerateNC12(benchmark::State& state) {
    for (auto _ : state) {
        auto pairings = enumerate_pairings(12, true);
        benchmark::DoNotOptimize(pairings.size());
    }
}
BENCHMARK(BM_EnumerateNC12);

void BM_FiniteN8(benchmark::State& state) {
    auto spec = *preset("toeplitz3").model;
    for (auto _ : state) {
        const double m = finite_n_moment(spec, 8, 300);
        benchmark::DoNotOptimize(m);
    }
}
BENCHMARK(BM_FiniteN8)->Unit(benchmark::kMillisecond);

void BM_SampleAndDiagonalize(benchmark::State& state) {
    auto spec = *preset("toeplitz3").model;
    SimConfig cfg;
    cfg.N = static_cast<int>(state.range(0));
    int rep = 0;
    for (auto _ : state) {
        const Matrix X = sample_matrix(spec, cfg, rep++);
        Eigen::SelfAdjointEigenSolver<Matrix> es(X, Eigen::EigenvaluesOnly);
        benchmark::DoNotOptimize(es.eigenvalues().sum());
    }
}
BENCHMARK(BM_SampleAndDiagonalize)->Arg(30)->Arg(60)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
