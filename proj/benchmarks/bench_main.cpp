#include <benchmark/benchmark.h>

#include <vector>

#include "fiberair/air.hpp"
#include "fiberair/link.hpp"
#include "fiberair/transceiver.hpp"
#include "fiberair/xpm.hpp"

using namespace fiberair;

namespace {

SampledSignal wdm_wave(std::size_t n_symbols) {
  WdmSpec spec;
  spec.n_channels = 3;
  spec.n_symbols = n_symbols;
  spec.oversampling = oversampling_with_guard(3, spec.grid_spacing, spec.symbol_rate);
  std::vector<SampledSignal> ws;
  for (int k = 0; k < 3; ++k) {
    Rng rng(static_cast<std::uint64_t>(k + 1));
    ws.push_back(modulate(generate_gaussian_symbols(n_symbols, 1e-3, rng), spec));
  }
  return wdm_mux(ws, spec);
}

void BM_SsfmSpan(benchmark::State& state) {
  const auto in = wdm_wave(static_cast<std::size_t>(state.range(0)));
  const FiberSpan span;
  const SsfmConfig cfg{100};
  for (auto _ : state) benchmark::DoNotOptimize(ssfm_propagate(in, span, cfg));
  state.SetItemsProcessed(state.iterations() * cfg.steps_per_span * static_cast<long>(in.size()));
}
BENCHMARK(BM_SsfmSpan)->Arg(1024)->Arg(8192)->Unit(benchmark::kMillisecond);

void BM_XpmKernel(benchmark::State& state) {
  LinkSpec link;
  link.scheme = static_cast<Scheme>(state.range(0));
  double mu = 30e9;
  for (auto _ : state) {
    benchmark::DoNotOptimize(xpm_kernel(link.scheme, 1e9, mu, 60e9, link));
    mu += 1e6;
  }
}
BENCHMARK(BM_XpmKernel)->DenseRange(0, 2);

void BM_XpmAutocorr(benchmark::State& state) {
  LinkSpec link;
  link.scheme = Scheme::CDM;
  const InterfererSpec w;
  for (auto _ : state) benchmark::DoNotOptimize(xpm_autocorr(0.0, 0.0, 0.0, link, w, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_XpmAutocorr)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_ParticleFilter(benchmark::State& state) {
  Rng rng(7);
  const auto x = generate_gaussian_symbols(2000, 1.0, rng);
  AuxChannelParams p;
  p.h0 = 1.0;
  p.sigma_n = 0.2;
  p.phase_model = PhaseModel::AR1;
  p.sigma_z = 0.05;
  const auto y = simulate_aux(x, p, rng);
  ParticleConfig cfg;
  cfg.n_particles = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(air_particle(x, y, p, cfg));
  state.SetItemsProcessed(state.iterations() * 2000 * state.range(0));
}
BENCHMARK(BM_ParticleFilter)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
