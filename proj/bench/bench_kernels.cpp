#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "eigenopt/diffusion.hpp"
#include "eigenopt/features.hpp"
#include "eigenopt/learn.hpp"
#include "eigenopt/options.hpp"
#include "eigenopt/spectral.hpp"

namespace {

using namespace eigenopt;

const GridWorld& four_room() {
  static const GridWorld g = load_map(std::string(EIGENOPT_MAPS_DIR) + "/four_room.txt");
  return g;
}

const std::vector<Eigenpurpose>& purposes() {
  static const auto p = pvf_sequence(four_room(), LaplacianKind::kNormalized, 32);
  return p;
}

const std::vector<Option>& eigenoptions() {
  static const auto o =
      option_prefix(discover_eigenoptions(four_room(), FeatureMap::tabular(four_room()), purposes()), 64);
  return o;
}

template <bool Parallel>
void BM_DiscoverEigenoptions(benchmark::State& state) {
  const auto f = FeatureMap::tabular(four_room());
  for (auto _ : state) {
    auto out = Parallel ? discover_eigenoptions(four_room(), f, purposes())
                        : discover_eigenoptions_serial(four_room(), f, purposes());
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_DiffusionTime(benchmark::State& state) {
  const DiffusionSpec spec(four_room(), eigenoptions());
  for (auto _ : state) benchmark::DoNotOptimize(Parallel ? diffusion_time(spec) : diffusion_time_serial(spec));
}

template <bool Parallel>
void BM_DiffusionTimeMc(benchmark::State& state) {
  const DiffusionSpec spec(four_room(), eigenoptions());
  const auto walks = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto est = Parallel ? diffusion_time_mc(spec, walks, 100'000'000, 1)
                        : diffusion_time_mc_serial(spec, walks, 100'000'000, 1);
    benchmark::DoNotOptimize(est.mean);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * walks));
}

template <bool Parallel>
void BM_QLearning(benchmark::State& state) {
  LearnConfig cfg;
  cfg.start = *four_room().start();
  cfg.goal = *four_room().goal();
  cfg.trials = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto curve = Parallel ? q_learning_with_options(four_room(), eigenoptions(), cfg, 0)
                          : q_learning_with_options_serial(four_room(), eigenoptions(), cfg, 0);
    benchmark::DoNotOptimize(curve.mean_return.data());
  }
}

BENCHMARK(BM_DiscoverEigenoptions<false>)->Name("discover_eigenoptions/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DiscoverEigenoptions<true>)->Name("discover_eigenoptions/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DiffusionTime<false>)->Name("diffusion_time/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DiffusionTime<true>)->Name("diffusion_time/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DiffusionTimeMc<false>)->Name("diffusion_time_mc/serial")->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DiffusionTimeMc<true>)->Name("diffusion_time_mc/parallel")->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_QLearning<false>)->Name("q_learning/serial")->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_QLearning<true>)->Name("q_learning/parallel")->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
