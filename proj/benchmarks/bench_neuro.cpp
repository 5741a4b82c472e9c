#include <benchmark/benchmark.h>

#include <random>

#include "dmpred/neuro/layers.hpp"
#include "dmpred/neuro/ops.hpp"

namespace {

using namespace dmpred::nn;

Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  Matrix m(r, c);
  for (double& v : m.data) v = u(rng);
  return m;
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  const auto a = constant(random_matrix(n, n, rng)), b = constant(random_matrix(n, n, rng));
  NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b).value().data.data());
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}
BENCHMARK(BM_Matmul)->Arg(32)->Arg(64)->Arg(128);

// One decision-maker batch: 10 examples x 10 trials, HC + behavioral input.
void BM_LstmForward(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto hidden = static_cast<std::size_t>(state.range(0));
  Lstm lstm(50, hidden, 1, rng);
  const auto x = constant(random_matrix(100, 50, rng));
  NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(lstm.forward(x, 10, {}).value().data.data());
}
BENCHMARK(BM_LstmForward)->Arg(32)->Arg(64);

void BM_LstmForwardBackward(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const auto hidden = static_cast<std::size_t>(state.range(0));
  Lstm lstm(50, hidden, 1, rng);
  ParamList ps;
  lstm.collect(ps, "lstm");
  const auto x = constant(random_matrix(100, 50, rng));
  for (auto _ : state) {
    for (auto& p : ps) p.tensor.zero_grad();
    backward(sum(lstm.forward(x, 10, {})));
  }
}
BENCHMARK(BM_LstmForwardBackward)->Arg(32)->Arg(64);

void BM_TransformerForward(benchmark::State& state) {
  std::mt19937_64 rng(4);
  const auto layers = static_cast<std::size_t>(state.range(0));
  Transformer tr(50, 32, 4, layers, 32, rng);
  const auto prefix = constant(random_matrix(5, 50, rng)), suffix = constant(random_matrix(5, 50, rng));
  NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(tr.forward(prefix, suffix, {}).value().data.data());
}
BENCHMARK(BM_TransformerForward)->Arg(1)->Arg(3);

}  // namespace
