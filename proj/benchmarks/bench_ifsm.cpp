#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "ifsm/chaos.hpp"
#include "ifsm/spectral.hpp"
#include "ifsm/thermo.hpp"
#include "ifsm/transfer.hpp"

using namespace ifsm;

namespace {

void BM_AssembleLine(benchmark::State& state) {
  const Grid g(DomainBox::unit(1), {static_cast<int>(state.range(0)), 1});
  const SystemSpec spec = fixtures::halving_exp(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_transfer(spec, g));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AssembleLine)->RangeMultiplier(4)->Range(256, 16384);

void BM_AssembleSquare(benchmark::State& state) {
  const Grid g = fixtures::dyadic_grid(static_cast<int>(state.range(0)));
  const SystemSpec spec = fixtures::market();
  for (auto _ : state) benchmark::DoNotOptimize(assemble_transfer(spec, g));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_AssembleSquare)->DenseRange(5, 8);

void BM_PowerIteration(benchmark::State& state) {
  const Grid g(DomainBox::unit(1), {static_cast<int>(state.range(0)), 1});
  const TransferMatrix B = assemble_transfer(fixtures::halving_exp(1.0), g);
  for (auto _ : state) benchmark::DoNotOptimize(power_iteration(B));
}
BENCHMARK(BM_PowerIteration)->RangeMultiplier(4)->Range(256, 16384);

void BM_Eigenmeasure(benchmark::State& state) {
  const Grid g(DomainBox::unit(1), {static_cast<int>(state.range(0)), 1});
  const TransferMatrix B = assemble_transfer(fixtures::halving_exp(1.0), g);
  for (auto _ : state) benchmark::DoNotOptimize(eigenmeasure(B));
}
BENCHMARK(BM_Eigenmeasure)->RangeMultiplier(4)->Range(256, 16384);

void BM_Pressure(benchmark::State& state) {
  const Grid g(DomainBox::unit(1), {static_cast<int>(state.range(0)), 1});
  const SystemSpec spec = fixtures::halving_exp(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(pressure(spec, g));
}
BENCHMARK(BM_Pressure)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_ChaosGame(benchmark::State& state) {
  const SystemSpec spec = fixtures::market();
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    const OrbitRecord orbit = sample_orbit(spec, {0.5, 0.5}, n, 42);
    benchmark::DoNotOptimize(empirical_measure(orbit, spec, 2));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ChaosGame)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
