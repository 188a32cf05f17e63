#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>

#include "tidp/regressors.hpp"
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
            y += v * (j + 1);
        }
        table.target.push_back(y + rng.normal(0.0, 1.0));
    }
    return table;
}

void BM_FitGbdt(benchmark::State& state) {
    const FeatureTable table = make_table(static_cast<int>(state.range(0)), 8, 11);
    RegressorConfig config;
    config.kind = ModelKind::gbdt;
    config.n_trees = 50;
    config.max_depth = 3;
    for (auto _ : state) {
        auto model = fit_regressor(table, config);
        benchmark::DoNotOptimize(model);
    }
}
BENCHMARK(BM_FitGbdt)->Arg(100)->Arg(400);

void BM_FitTree(benchmark::State& state) {
    const FeatureTable table = make_table(static_cast<int>(state.range(0)), 8, 11);
    RegressorConfig config;
    config.kind = ModelKind::dt;
    config.max_depth = 5;
    for (auto _ : state) {
        auto model = fit_regressor(table, config);
        benchmark::DoNotOptimize(model);
    }
}
BENCHMARK(BM_FitTree)->Arg(100)->Arg(400)->Arg(1000);

void BM_FitOls(benchmark::State& state) {
    const FeatureTable table = make_table(static_cast<int>(state.range(0)), 8, 11);
    RegressorConfig config;
    config.kind = ModelKind::ols;
    for (auto _ : state) {
        auto model = fit_regressor(table, config);
        benchmark::DoNotOptimize(model);
    }
}
BENCHMARK(BM_FitOls)->Arg(400)->Arg(2000);

}  // namespace
