#include <benchmark/benchmark.h>

#include "dmpred/eval/metrics.hpp"
#include "dmpred/features.hpp"
#include "dmpred/models/svr.hpp"
#include "dmpred/simulator.hpp"

namespace {

using namespace dmpred;

Dataset simulated(int pairs) {
  sim::SimConfig cfg;
  cfg.n_pairs = pairs;
  cfg.seed = 9;
  return sim::generate_dataset(cfg);
}

void BM_HcFeatures(benchmark::State& state) {
  const auto hotels = sim::builtin_hotels();
  for (auto _ : state)
    for (const auto& h : hotels)
      for (const auto& r : h.reviews) benchmark::DoNotOptimize(hand_crafted_features(r));
  state.SetItemsProcessed(state.iterations() * 70);
}
BENCHMARK(BM_HcFeatures);

void BM_Simulate(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(simulated(static_cast<int>(state.range(0))).games().size());
}
BENCHMARK(BM_Simulate)->Arg(60)->Arg(408);

void BM_SvrTrain(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<std::vector<double>> x(n, std::vector<double>(92));
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (double& v : x[i]) v = u(rng);
    y[i] = 0.5 * x[i][0] + 0.3 * x[i][1] * x[i][2];
  }
  SvrParams p;
  for (auto _ : state) benchmark::DoNotOptimize(SvrModel::train(x, y, p));
}
BENCHMARK(BM_SvrTrain)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_Report(benchmark::State& state) {
  const auto data = simulated(101);
  const auto ex = expand_games(data.games());
  const auto outcomes = eval::constant_label_outcomes(ex, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval::compute_report(outcomes));
    benchmark::DoNotOptimize(eval::ablation_report(outcomes));
  }
}
BENCHMARK(BM_Report);

void BM_Ewg(benchmark::State& state) {
  const auto train = expand_games(simulated(60).games());
  const auto test = expand_games(simulated(20).games());
  for (auto _ : state) benchmark::DoNotOptimize(eval::ewg_baseline(train, test, 500, 1));
}
BENCHMARK(BM_Ewg)->Unit(benchmark::kMillisecond);

}  // namespace
