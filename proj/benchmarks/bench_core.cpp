#include <map>
#include <random>
#include <string>

#include <benchmark/benchmark.h>

#include "hyperviz/catalog.hpp"
#include "hyperviz/mapping.hpp"
#include "hyperviz/spatial_index.hpp"

using namespace hyperviz;

namespace {

std::string csv_text(std::size_t rows) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> v(0.0, 100.0);
  std::string out = "a,b,c,d\n";
  for (std::size_t i = 0; i < rows; ++i) {
    out += std::to_string(v(rng)) + "," + std::to_string(v(rng)) + "," + std::to_string(v(rng)) + "," +
           std::to_string(v(rng)) + "\n";
  }
  return out;
}

ChannelMapping mapping() {
  ChannelMapping m;
  m.assign(VisualChannel::pos_x, "a");
  m.assign(VisualChannel::pos_y, "b");
  m.assign(VisualChannel::pos_z, "c");
  m.assign(VisualChannel::size, "d");
  return m;
}

const Catalog& catalog(std::size_t rows) {
  static std::map<std::size_t, Catalog> cache;
  auto it = cache.find(rows);
  if (it == cache.end()) it = cache.emplace(rows, parse_catalog(csv_text(rows))).first;
  return it->second;
}

const Scene& scene(std::size_t rows) {
  static std::map<std::size_t, Scene> cache;
  auto it = cache.find(rows);
  if (it == cache.end()) it = cache.emplace(rows, build_scene(catalog(rows), mapping())).first;
  return it->second;
}

void BM_ParseCatalog(benchmark::State& state) {
  const std::string text = csv_text(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(parse_catalog(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseCatalog)->Arg(100'000)->Unit(benchmark::kMillisecond);

void BM_BuildScene(benchmark::State& state) {
  const Catalog& c = catalog(static_cast<std::size_t>(state.range(0)));
  const ChannelMapping m = mapping();
  for (auto _ : state) benchmark::DoNotOptimize(build_scene(c, m));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildScene)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

void BM_BuildIndex(benchmark::State& state) {
  const Scene& s = scene(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(SpatialIndex(s));
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildIndex)->RangeMultiplier(4)->Range(1 << 14, 1 << 20)->Unit(benchmark::kMillisecond)->Complexity();

void BM_Pick(benchmark::State& state) {
  const Scene& s = scene(1'000'000);
  const SpatialIndex index(s);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto _ : state) {
    const double x = u(rng), y = u(rng);
    const Ray ray = Ray::through({x, y, -1.0}, {u(rng) - x, u(rng) - y, 3.0});
    benchmark::DoNotOptimize(index.pick(ray, 0.002));
  }
}
BENCHMARK(BM_Pick)->Unit(benchmark::kMicrosecond);

void BM_Knn(benchmark::State& state) {
  const Scene& s = scene(1'000'000);
  const SpatialIndex index(s);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto k = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(index.knn({u(rng), u(rng), u(rng)}, k));
}
BENCHMARK(BM_Knn)->Arg(1)->Arg(10)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_Decimate(benchmark::State& state) {
  const Scene& s = scene(1'000'000);
  const SpatialIndex index(s);
  const auto budget = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(decimate(s, index, budget));
}
BENCHMARK(BM_Decimate)->Arg(10'000)->Arg(200'000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
