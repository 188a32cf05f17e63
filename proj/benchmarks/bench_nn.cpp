#include <benchmark/benchmark.h>

#include <vector>

#include "tidp/encoders.hpp"
#include "tidp/match.hpp"
#include "tidp/nn/layers.hpp"
#include "tidp/rng.hpp"

namespace {

using namespace tidp;

void BM_LstmForward(benchmark::State& state) {
    const int hidden = static_cast<int>(state.range(0));
    nn::Lstm lstm(kTextBits, hidden);
    Rng rng(7);
    lstm.init(rng);
    const Dense2D x = text_to_binary("Accident on I-80 Westbound, two lanes blocked near exit");
    for (auto _ : state) {
        auto h = lstm.forward(x, nullptr);
        benchmark::DoNotOptimize(h);
    }
}
BENCHMARK(BM_LstmForward)->Arg(8)->Arg(16);

void BM_LstmBackward(benchmark::State& state) {
    const int hidden = static_cast<int>(state.range(0));
    nn::Lstm lstm(kTextBits, hidden);
    Rng rng(7);
    lstm.init(rng);
    const Dense2D x = text_to_binary("Accident on I-80 Westbound, two lanes blocked near exit");
    std::vector<double> grad(static_cast<std::size_t>(hidden), 0.5);
    for (auto _ : state) {
        nn::Lstm::Trace trace;
        auto h = lstm.forward(x, &trace);
        benchmark::DoNotOptimize(h);
        nn::zero_grads(lstm.param_blocks());
        lstm.backward(x, trace, grad);
    }
}
BENCHMARK(BM_LstmBackward)->Arg(8)->Arg(16);

void BM_MlpForward(benchmark::State& state) {
    nn::Mlp net;
    net.layers.emplace_back(kWindowSlots, 64, nn::Activation::relu);
    net.layers.emplace_back(64, static_cast<int>(state.range(0)), nn::Activation::sigmoid);
    net.layers.emplace_back(static_cast<int>(state.range(0)), 64, nn::Activation::relu);
    net.layers.emplace_back(64, kWindowSlots, nn::Activation::identity);
    Rng rng(7);
    net.init(rng);
    std::vector<double> x(kWindowSlots, 0.4);
    for (auto _ : state) {
        auto y = net.forward(x);
        benchmark::DoNotOptimize(y);
    }
}
BENCHMARK(BM_MlpForward)->Arg(8)->Arg(16);

}  // namespace
