#include <benchmark/benchmark.h>

#include "tidp/eval.hpp"
#include "tidp/rng.hpp"

namespace {

using namespace tidp;

FeatureTable make_table(int rows, int cols, std::uint64_t seed) {
    FeatureTable table;
    table.values = Dense2D::zeros(rows, cols);
    Rng rng(seed);
    for (int j = 0; j < cols; ++j) table.feature_names.push_back("f" + std::to_string(j));
    for (int i = 0; i < rows; ++i) {
        double y = 10.0;
        for (int j = 0; j < cols; ++j) {
            const double v = rng.uniform(0.0, 5.0);
            table.values.at(i, j) = v;
            y += v;
        }
        table.target.push_back(y);
    }
    return table;
}

void BM_CrossValidateGbdt(benchmark::State& state) {
    const FeatureTable table = make_table(static_cast<int>(state.range(0)), 8, 3);
    RegressorConfig config;
    config.kind = ModelKind::gbdt;
    config.n_trees = 30;
    config.max_depth = 3;
    const FoldPlan plan = make_folds(table.n_rows(), 10, 5);
    for (auto _ : state) {
        auto cv = cross_validate(table, config, plan);
        benchmark::DoNotOptimize(cv);
    }
}
BENCHMARK(BM_CrossValidateGbdt)->Arg(200);

void BM_ParetoFront(benchmark::State& state) {
    Rng rng(9);
    std::vector<std::pair<double, double>> points;
    for (int i = 0; i < state.range(0); ++i)
        points.emplace_back(rng.uniform(10.0, 60.0), rng.uniform(5.0, 40.0));
    for (auto _ : state) {
        auto front = pareto_front_indices(points);
        benchmark::DoNotOptimize(front);
    }
}
BENCHMARK(BM_ParetoFront)->Arg(140)->Arg(10000);

void BM_RandomVectorExperiment(benchmark::State& state) {
    for (auto _ : state) {
        auto result =
            random_vector_experiment(100, 1.0, 10.0, static_cast<int>(state.range(0)), 7);
        benchmark::DoNotOptimize(result);
    }
}
BENCHMARK(BM_RandomVectorExperiment)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
