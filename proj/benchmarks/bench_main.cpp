#include <benchmark/benchmark.h>

#include <random>

#include "fluocnn/nn/layers.hpp"
#include "fluocnn/nn/network.hpp"
#include "fluocnn/nn/train.hpp"
#include "fluocnn/stats/t_distribution.hpp"

using namespace fluocnn;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

nn::Conv1DLayer conv_layer(std::size_t out, std::size_t in, std::size_t k) {
  nn::Conv1DLayer l(out, in, k);
  l.filters = noise(l.filters.size(), 1);
  return l;
}

// First layer of the chosen network: 1 x 1024 -> 6 x 985.
void BM_Conv1Forward(benchmark::State& state) {
  const auto layer = conv_layer(6, 1, 40);
  nn::FeatureMaps x(1, 1024);
  x.values = noise(1024, 2);
  nn::FeatureMaps out;
  for (auto _ : state) {
    nn::conv1d_forward_into(x, layer, out);
    benchmark::DoNotOptimize(out.values.data());
  }
  state.SetItemsProcessed(state.iterations() * 6 * 985 * 40);
}
BENCHMARK(BM_Conv1Forward);

// Second layer: 6 x 123 -> 4 x 104.
void BM_Conv2Forward(benchmark::State& state) {
  const auto layer = conv_layer(4, 6, 20);
  nn::FeatureMaps x(6, 123);
  x.values = noise(6 * 123, 3);
  nn::FeatureMaps out;
  for (auto _ : state) {
    nn::conv1d_forward_into(x, layer, out);
    benchmark::DoNotOptimize(out.values.data());
  }
  state.SetItemsProcessed(state.iterations() * 4 * 104 * 6 * 20);
}
BENCHMARK(BM_Conv2Forward);

void BM_Conv1Backward(benchmark::State& state) {
  const auto layer = conv_layer(6, 1, 40);
  nn::FeatureMaps x(1, 1024);
  x.values = noise(1024, 4);
  // After max pooling (8) only one output in eight carries a gradient.
  nn::FeatureMaps g(6, 985);
  for (std::size_t i = 0; i < g.values.size(); i += 8) g.values[i] = 1.0;
  std::vector<double> gf(layer.filters.size()), gb(6);
  for (auto _ : state) {
    nn::conv1d_backward_accumulate(g, x, layer, gf, gb, nullptr);
    benchmark::DoNotOptimize(gf.data());
  }
}
BENCHMARK(BM_Conv1Backward);

void BM_NetworkForwardEval(benchmark::State& state) {
  Rng rng(5);
  const auto net = nn::Network::build(nn::HyperParams{}, 1024, rng);
  const auto x = noise(1024, 6);
  nn::ForwardCache cache;
  for (auto _ : state) benchmark::DoNotOptimize(nn::forward_eval(net, x, cache));
}
BENCHMARK(BM_NetworkForwardEval);

// One 64-sample Adam epoch over 64 random spectra.
void BM_TrainEpoch(benchmark::State& state) {
  std::vector<std::vector<double>> xs;
  std::vector<nn::Sample> samples;
  for (int i = 0; i < 64; ++i) xs.push_back(noise(1024, 100 + i));
  for (int i = 0; i < 64; ++i) samples.push_back({xs[i], 0.01 * i});
  nn::HyperParams hp;
  hp.epochs = 1;
  Rng init(7), shuffle(8);
  auto net = nn::Network::build(hp, 1024, init);
  nn::TrainOptions opt;
  opt.monitor_every = 1000;
  for (auto _ : state) benchmark::DoNotOptimize(nn::train(net, samples, hp, shuffle, opt));
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_TrainEpoch)->Unit(benchmark::kMillisecond);

void BM_TCritical(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(stats::t_critical(0.05, 42.0));
}
BENCHMARK(BM_TCritical);

}  // namespace
BENCHMARK_MAIN();
