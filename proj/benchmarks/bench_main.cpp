#include <benchmark/benchmark.h>

#include "lipext/energy.hpp"
#include "lipext/extension.hpp"
#include "lipext/verification.hpp"
#include "random_instances.hpp"

using namespace lipext;

namespace {

MetricInstance cloud(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto c = static_cast<std::size_t>(state.range(1));
  return lipext::testing::random_cloud(7, {n, n, c, c, 3, 3});
}

ScaleSchedule plan(const MetricInstance& inst) {
  ScheduleRequest req;
  req.epsilon = inst.lipschitz() / 2;
  return plan_schedule(inst, req);
}

}  // namespace

static void BM_PlanSchedule(benchmark::State& state) {
  const auto inst = cloud(state);
  for (auto _ : state) benchmark::DoNotOptimize(plan(inst));
}
BENCHMARK(BM_PlanSchedule)->Args({200, 50})->Args({1000, 200});

static void BM_BuildModel(benchmark::State& state) {
  const auto inst = cloud(state);
  const auto s = plan(inst);
  for (auto _ : state) {
    ExtensionModel model(inst, s);
    benchmark::DoNotOptimize(model.profiles().data());
  }
}
BENCHMARK(BM_BuildModel)->Args({200, 50})->Args({1000, 200});

static void BM_Extend(benchmark::State& state) {
  const auto inst = cloud(state);
  const ExtensionModel model(inst, plan(inst));
  const auto all = inst.all_indices();
  const auto threads = static_cast<unsigned>(state.range(2));
  for (auto _ : state) benchmark::DoNotOptimize(extend(model, all, threads));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(all.size()));
}
BENCHMARK(BM_Extend)->Args({200, 50, 1})->Args({1000, 200, 1})->Args({1000, 200, 4});

static void BM_ExtendLocalized(benchmark::State& state) {
  const auto inst = cloud(state);
  const ExtensionModel model(inst, plan(inst));
  const auto all = inst.all_indices();
  for (auto _ : state)
    for (Index y : all) benchmark::DoNotOptimize(extend_localized(model, y, model.nearest_anchor(y)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(all.size()));
}
BENCHMARK(BM_ExtendLocalized)->Args({200, 50})->Args({1000, 200});

static void BM_GlobalLipschitzScan(benchmark::State& state) {
  const auto inst = cloud(state);
  const ExtensionModel model(inst, plan(inst));
  const auto all = inst.all_indices();
  const auto field = extend(model, all);
  for (auto _ : state) benchmark::DoNotOptimize(check_global_lipschitz(field, inst, 2 * inst.lipschitz()));
}
BENCHMARK(BM_GlobalLipschitzScan)->Args({200, 50})->Args({1000, 200});

static void BM_Energy(benchmark::State& state) {
  const auto inst = cloud(state);
  const ExtensionModel model(inst, plan(inst));
  const auto all = inst.all_indices();
  const auto f = extend(model, all).values();
  MeasureData m;
  m.masses.assign(inst.size(), 0.0);
  for (Index c : inst.subset()) m.masses[c] = 1.0;
  m.p = 2.0;
  for (auto _ : state) benchmark::DoNotOptimize(energy(inst, f, all, m, 0.3 * inst.diameter()));
}
BENCHMARK(BM_Energy)->Args({200, 50})->Args({1000, 200});
BENCHMARK_MAIN();
