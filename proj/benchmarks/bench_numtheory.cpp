// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "primefam/families.hpp"
#include "primefam/features.hpp"
#include "primefam/numtheory.hpp"

using namespace primefam;

namespace {

// Odd candidates starting at 10^exponent.
void BM_IsPrime(benchmark::State& state) {
  std::uint64_t n = 1;
  for (int i = 0; i < state.range(0); ++i) n *= 10;
  n += 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(numtheory::is_prime(n));
    n += 2;
  }
}
BENCHMARK(BM_IsPrime)->Arg(9)->Arg(12)->Arg(16)->Arg(19);

void BM_NextPrime(benchmark::State& state) {
  std::uint64_t n = 1;
  for (int i = 0; i < state.range(0); ++i) n *= 10;
  for (auto _ : state) {
    n = numtheory::next_prime(n + 1);
    benchmark::DoNotOptimize(n);
  }
}
BENCHMARK(BM_NextPrime)->Arg(9)->Arg(16);

void BM_MakeContext(benchmark::State& state) {
  std::uint64_t p = numtheory::next_prime(state.range(0) == 0 ? 500'000'000ULL : 10'000'000'000'000'000ULL);
  for (auto _ : state) {
    benchmark::DoNotOptimize(numtheory::make_context(p));
    p = numtheory::next_prime(p + 1);
  }
}
BENCHMARK(BM_MakeContext)->Arg(0)->Arg(1);

// Labeling includes the Chen test, which factors p + 2.
void BM_LabelPrime(benchmark::State& state) {
  std::uint64_t p = numtheory::next_prime(state.range(0) == 0 ? 500'000'000ULL : 10'000'000'000'000'000ULL);
  const auto ctx = numtheory::make_context(p);
  for (auto _ : state) benchmark::DoNotOptimize(label_prime(ctx));
}
BENCHMARK(BM_LabelPrime)->Arg(0)->Arg(1);

void BM_CausalFeatures(benchmark::State& state) {
  const auto ctx = numtheory::make_context(numtheory::next_prime(1'000'000'000'000ULL));
  for (auto _ : state) benchmark::DoNotOptimize(causal_features(ctx));
}
BENCHMARK(BM_CausalFeatures);

}  // namespace
