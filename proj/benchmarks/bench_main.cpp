#include <benchmark/benchmark.h>

#include <random>

#include "nhad/datagen.hpp"
#include "nhad/detector.hpp"
#include "nhad/fuzzy.hpp"
#include "nhad/reputation.hpp"

namespace {

const nhad::fuzzy::FuzzyInferenceSystem& fis() {
  static const auto f = nhad::fuzzy::build_default_fis();
  return f;
}

nhad::LabeledNetwork network(double lambda) {
  nhad::SyntheticConfig c;
  c.lambda = lambda;
  c.anomaly_fraction = 0.1;
  c.seed = 5;
  return nhad::generate(c);
}

void BM_Infer(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<nhad::fuzzy::InputVector> inputs(256);
  for (auto& a : inputs) a = {u(rng), u(rng), u(rng), u(rng), u(rng)};
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fis().crisp(inputs[i++ % inputs.size()]));
  }
}
BENCHMARK(BM_Infer);

void BM_BuildGraph(benchmark::State& state) {
  const auto net = network(static_cast<double>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(nhad::build_reputation_graph(net.records, net.network));
  }
  state.counters["records"] = static_cast<double>(net.records.size());
}
BENCHMARK(BM_BuildGraph)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Detect(benchmark::State& state) {
  const auto net = network(static_cast<double>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(nhad::run_detection(net.records, net.network, fis(), nhad::DetectionConfig{}));
  }
  state.counters["users"] = static_cast<double>(net.users.size());
}
BENCHMARK(BM_Detect)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
