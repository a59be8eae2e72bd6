#include <benchmark/benchmark.h>

#include "bellclass/classifier.hpp"
#include "bellclass/detectors.hpp"
#include "bellclass/hull.hpp"
#include "bellclass/product_opt.hpp"
#include "bellclass/states.hpp"
#include "bellclass/symmetry.hpp"
#include "bellclass/witness.hpp"

using namespace bellclass;

namespace {

std::vector<BellDiagonalState> enclosure_states(int d, std::size_t n) {
  Rng rng(11);
  std::vector<BellDiagonalState> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(sample_enclosure(d, rng));
  return out;
}

void BM_SampleEnclosure(benchmark::State& st) {
  const int d = static_cast<int>(st.range(0));
  Rng rng(1);
  for (auto _ : st) benchmark::DoNotOptimize(sample_enclosure(d, rng));
}
BENCHMARK(BM_SampleEnclosure)->DenseRange(2, 6);

void BM_Ppt(benchmark::State& st) {
  const auto states = enclosure_states(static_cast<int>(st.range(0)), 256);
  std::size_t i = 0;
  for (auto _ : st) benchmark::DoNotOptimize(ppt_min_eigenvalue(states[i++ % states.size()]));
}
BENCHMARK(BM_Ppt)->DenseRange(2, 6);

void BM_Realignment(benchmark::State& st) {
  const auto states = enclosure_states(static_cast<int>(st.range(0)), 256);
  std::size_t i = 0;
  for (auto _ : st) benchmark::DoNotOptimize(realignment_sum(states[i++ % states.size()]));
}
BENCHMARK(BM_Realignment)->DenseRange(2, 6);

void BM_Concurrence(benchmark::State& st) {
  const auto states = enclosure_states(static_cast<int>(st.range(0)), 256);
  std::size_t i = 0;
  for (auto _ : st) benchmark::DoNotOptimize(quasipure_concurrence(states[i++ % states.size()]));
}
BENCHMARK(BM_Concurrence)->DenseRange(2, 6);

void BM_WeylSum(benchmark::State& st) {
  const auto states = enclosure_states(static_cast<int>(st.range(0)), 256);
  std::size_t i = 0;
  for (auto _ : st) benchmark::DoNotOptimize(weyl_representation_sum(states[i++ % states.size()]));
}
BENCHMARK(BM_WeylSum)->DenseRange(2, 6);

void BM_HullMembership(benchmark::State& st) {
  const int d = static_cast<int>(st.range(0));
  const auto group = generate_group(d);
  auto vs = SeparableVertexSet::kernel(d);
  vs.symmetric = true;
  const HullOracle oracle(vs, &group);
  const auto states = enclosure_states(d, 64);
  std::size_t i = 0;
  for (auto _ : st) benchmark::DoNotOptimize(oracle.contains(states[i++ % states.size()]));
}
BENCHMARK(BM_HullMembership)->DenseRange(2, 4)->Unit(benchmark::kMicrosecond);

void BM_ProductOptimizer(benchmark::State& st) {
  const int d = static_cast<int>(st.range(0));
  Rng rng(5);
  std::vector<double> kappa(static_cast<std::size_t>(d) * d);
  for (auto& k : kappa) k = rng.uniform(-1.0, 1.0);
  ProductOptimizerConfig cfg;
  cfg.starts = 16;
  for (auto _ : st) benchmark::DoNotOptimize(maximize_over_products(kappa, d, rng, cfg));
}
BENCHMARK(BM_ProductOptimizer)->DenseRange(3, 4)->Unit(benchmark::kMillisecond);

void BM_WitnessCertification(benchmark::State& st) {
  const int d = static_cast<int>(st.range(0));
  Rng rng(7);
  for (auto _ : st) benchmark::DoNotOptimize(random_witness(d, rng));
}
BENCHMARK(BM_WitnessCertification)->DenseRange(3, 4)->Unit(benchmark::kMillisecond);

void BM_Classify(benchmark::State& st) {
  const int d = static_cast<int>(st.range(0));
  ResourceBudget budget;
  budget.bank_size = 100;
  budget.extension_budget = 2;
  const Classifier classifier(build_resources(d, 3, budget));
  const auto states = enclosure_states(d, 128);
  std::size_t i = 0;
  for (auto _ : st) benchmark::DoNotOptimize(classifier.classify(states[i++ % states.size()]));
}
BENCHMARK(BM_Classify)->DenseRange(3, 4)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
