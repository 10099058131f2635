#include <benchmark/benchmark.h>

#include "mctcp/channel/particle_engine.hpp"
#include "mctcp/channel/reliability.hpp"
#include "mctcp/channel/statistical_channel.hpp"
#include "mctcp/engine.hpp"
#include "mctcp/rng.hpp"

using namespace mctcp;

namespace {

channel::ChannelStats r_stats(double d) {
  const engine::SimConfig cfg;
  return channel::analytic_channel_stats(
      channel::Species::R, d, channel::diffusion_coefficient(cfg.medium, cfg.r_species),
      cfg.tx_geometry, cfg.fit, cfg.codec.symbol_time_s);
}

void BM_PCorrectSymbol(benchmark::State& state) {
  const auto q = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(channel::p_correct_symbol(q, 0.0235, 34));
}
BENCHMARK(BM_PCorrectSymbol)->Arg(2000)->Arg(16000)->Arg(100000);

void BM_RangingTable(benchmark::State& state) {
  channel::ReliabilityModel m;
  m.receiver = engine::SimConfig{}.tx_geometry;
  for (auto _ : state) {
    for (double d : {26.5e-6, 35.4e-6, 44.2e-6, 53.0e-6, 61.9e-6}) {
      benchmark::DoNotOptimize(channel::min_burst_for_reliability(m, d, 0.9, 1000, 20));
    }
  }
}
BENCHMARK(BM_RangingTable);

void BM_StatisticalTransmit(benchmark::State& state) {
  const channel::ArrivalSampler sampler(r_stats(26.5e-6));
  Rng rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(channel::statistical_transmit(state.range(0), sampler, rng));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_StatisticalTransmit)->Arg(1000)->Arg(100000);

void BM_ParticleBurst(benchmark::State& state) {
  channel::BurstSetup setup;
  setup.species = {channel::Species::R, 3.5e-9};
  setup.receiver = engine::SimConfig{}.tx_geometry;
  setup.p_capture = 0.01141;
  setup.distance_m = 26.5e-6;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(channel::simulate_burst(setup, 2000, 200.0, seed++));
  }
  state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK(BM_ParticleBurst)->Unit(benchmark::kMillisecond);

void BM_EngineRun(benchmark::State& state) {
  engine::SimConfig c;
  c.distance_m = state.range(0) * 1e-7;
  c.record_events = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(engine::run(c));
    ++c.seed;
  }
}
BENCHMARK(BM_EngineRun)->Arg(265)->Arg(619)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
