#include "tailrisk/asymptotics.hpp"
#include "tailrisk/estimators.hpp"
#include "tailrisk/oracle.hpp"
#include "tailrisk/random.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

using namespace tailrisk;

namespace {

const double e = std::exp(1.0);

ModelSpec lognormal_logfactor(std::size_t n) {
  return ModelSpec::iid(TailLaw::lognormal(0, 1), TailLaw::log_factor_pareto(1, 2, e), n);
}

void BM_Uniform(benchmark::State& state) {
  Stream s(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(s.uniform());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Uniform);

void BM_Sample(benchmark::State& state) {
  const std::vector<TailLaw> laws{TailLaw::pareto(1.5, 1), TailLaw::log_power_pareto(1, 2, e),
                                  TailLaw::log_factor_pareto(1, 2, e), TailLaw::lognormal(0, 1)};
  const TailLaw& law = laws[static_cast<std::size_t>(state.range(0))];
  state.SetLabel(std::string(family_name(law.family())));
  Stream s(2, 0);
  for (auto _ : state) benchmark::DoNotOptimize(law.sample(s));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Sample)->DenseRange(0, 3);

void BM_Simulate(benchmark::State& state) {
  const ModelSpec spec = lognormal_logfactor(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(simulate(spec, 10000, 3, 1));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_Simulate)->Arg(1)->Arg(3)->Arg(10);

void BM_Tail(benchmark::State& state) {
  const ModelSpec spec = lognormal_logfactor(2);
  const auto method = static_cast<TailMethod>(state.range(0));
  state.SetLabel(std::string(method_name(method)));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_tail(spec, Which::S, 1e5, method, {10000, 4, 1}));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_Tail)->DenseRange(0, 2);

void BM_PairedDifference(benchmark::State& state) {
  const ModelSpec spec = lognormal_logfactor(3);
  for (auto _ : state) benchmark::DoNotOptimize(paired_difference_moment(spec, 1, 1.0, {10000, 5, 1}));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_PairedDifference);

void BM_OracleProductTail(benchmark::State& state) {
  const std::vector<TailLaw> laws(static_cast<std::size_t>(state.range(0)), TailLaw::log_factor_pareto(1, 2, e));
  for (auto _ : state) benchmark::DoNotOptimize(oracle::product_tail(laws, 1e6));
}
BENCHMARK(BM_OracleProductTail)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_OracleModelTail(benchmark::State& state) {
  const ModelSpec spec = lognormal_logfactor(2);
  for (auto _ : state) benchmark::DoNotOptimize(oracle::model_tail(spec, Which::S, 1e5, {0.0, 1e-6}));
}
BENCHMARK(BM_OracleModelTail)->Unit(benchmark::kMillisecond)->Iterations(1);

void BM_Rootzen(benchmark::State& state) {
  const std::vector<double> g{0.5, 1.0, 2.0, 3.5};
  for (auto _ : state) benchmark::DoNotOptimize(rootzen_coefficient(g, 1.5));
}
BENCHMARK(BM_Rootzen);

}  // namespace
BENCHMARK_MAIN();
