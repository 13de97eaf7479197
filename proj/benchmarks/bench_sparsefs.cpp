#include <benchmark/benchmark.h>

#include "sparsefs/dimred.hpp"
#include "sparsefs/neighbors.hpp"
#include "sparsefs/preprocess.hpp"
#include "sparsefs/sparse.hpp"
#include "sparsefs/synthetic.hpp"

using namespace sparsefs;

namespace {

synthetic::SyntheticData problem(std::size_t rows, std::size_t cols) {
    return synthetic::make_sparse_linear({rows, cols, cols / 20 + 1, 0.01, 0.5, 7});
}

void BM_LassoCd(benchmark::State& state) {
    const auto data = problem(static_cast<std::size_t>(state.range(0)),
                              static_cast<std::size_t>(state.range(1)));
    sparse::SolverConfig cfg;
    cfg.center_targets = true;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sparse::lasso_cd(data.features, data.targets, 0.05, cfg));
    }
}
BENCHMARK(BM_LassoCd)->Args({200, 500})->Args({500, 2048})->Unit(benchmark::kMillisecond);

void BM_Fista(benchmark::State& state) {
    const auto data = problem(static_cast<std::size_t>(state.range(0)),
                              static_cast<std::size_t>(state.range(1)));
    sparse::SolverConfig cfg;
    cfg.center_targets = true;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sparse::fista(data.features, data.targets, 0.05, cfg));
    }
}
BENCHMARK(BM_Fista)->Args({200, 500})->Args({500, 2048})->Unit(benchmark::kMillisecond);

void BM_Ista(benchmark::State& state) {
    const auto data = problem(200, 500);
    sparse::SolverConfig cfg;
    cfg.center_targets = true;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sparse::ista(data.features, data.targets, 0.05, cfg));
    }
}
BENCHMARK(BM_Ista)->Unit(benchmark::kMillisecond);

void BM_KnnPredict(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto train = problem(n, 64);
    const auto test = synthetic::make_sparse_linear({200, 64, 4, 0.01, 0.5, 8});
    const auto model = neighbors::knn_fit(train.features, train.labels, 5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(neighbors::knn_predict(model, test.features));
    }
    state.SetItemsProcessed(state.iterations() * 200);
}
BENCHMARK(BM_KnnPredict)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_PcaFit(benchmark::State& state) {
    const auto data = problem(300, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(dimred::pca_fit(data.features, 50));
    }
}
BENCHMARK(BM_PcaFit)->Arg(100)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_Standardize(benchmark::State& state) {
    const auto data = problem(1000, 2048);
    for (auto _ : state) {
        const auto stats = preprocess::fit_standardizer(data.features);
        benchmark::DoNotOptimize(preprocess::apply_standardizer(data.features, stats));
    }
}
BENCHMARK(BM_Standardize)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
