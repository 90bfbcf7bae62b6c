// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "primefam/losses.hpp"
#include "primefam/network.hpp"

using namespace primefam;

namespace {

nn::Matrix<float> batch(Eigen::Index rows, int dim) {
  nn::Matrix<float> x(rows, dim);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = static_cast<float>((i * 37 % 101) / 101.0);
  return x;
}

void BM_Forward(benchmark::State& state) {
  const auto params = nn::NetworkParams<float>::initialized(nn::Architecture::residual_net(25), 42);
  const auto x = batch(state.range(0), 25);
  for (auto _ : state) benchmark::DoNotOptimize(nn::predict(params, x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Forward)->Arg(512)->Arg(4096)->Unit(benchmark::kMillisecond);

// One optimizer-free training step: forward with dropout, loss, backward.
void BM_TrainStep(benchmark::State& state) {
  const auto params = nn::NetworkParams<float>::initialized(nn::Architecture::residual_net(25), 42);
  const auto x = batch(state.range(0), 25);
  nn::Matrix<float> y = nn::Matrix<float>::Zero(state.range(0), 7);
  for (Eigen::Index i = 0; i < y.rows(); i += 5) y(i, i % 7) = 1.0f;
  const LossConfig loss;
  std::uint64_t step = 0;
  for (auto _ : state) {
    auto [pred, trace] = nn::forward(params, x, true, ++step);
    const auto lg = loss_and_grad(loss, y, pred);
    benchmark::DoNotOptimize(nn::backward(params, trace, lg.grad));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrainStep)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_ShallowForward(benchmark::State& state) {
  const auto params = nn::NetworkParams<float>::initialized(nn::Architecture::shallow_net(25), 42);
  const auto x = batch(4096, 25);
  for (auto _ : state) benchmark::DoNotOptimize(nn::predict(params, x));
}
BENCHMARK(BM_ShallowForward)->Unit(benchmark::kMicrosecond);

}  // namespace
