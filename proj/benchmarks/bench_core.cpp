#include <benchmark/benchmark.h>

#include "salobj/forest.hpp"
#include "salobj/metrics.hpp"
#include "salobj/proposals.hpp"
#include "salobj/random.hpp"
#include "salobj/raster.hpp"
#include "salobj/segfeat.hpp"
#include "salobj/stats.hpp"

using namespace salobj;

namespace {

GrayMap noise_map(int w, int h, std::uint64_t seed) {
  Rng rng(seed);
  GrayMap m(w, h);
  for (auto& v : m.data) v = rng.uniform();
  return m;
}

BinaryMask ellipse(int w, int h) {
  BinaryMask m(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dx = (x - w / 2.0) / (w / 3.0), dy = (y - h / 2.0) / (h / 4.0);
      if (dx * dx + dy * dy <= 1.0) m.set(x, y);
    }
  }
  return m;
}

RgbImage noise_image(int w, int h, std::uint64_t seed) {
  Rng rng(seed);
  RgbImage img(w, h);
  for (auto& v : img.data) v = static_cast<std::uint8_t>(rng.below(256));
  return img;
}

void BM_GaussianBlur(benchmark::State& state) {
  const GrayMap m = noise_map(320, 240, 1);
  const double sigma = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_blur(m, sigma));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.size()));
}
BENCHMARK(BM_GaussianBlur)->Arg(2)->Arg(10)->Arg(30);

void BM_PrCurve(benchmark::State& state) {
  const std::vector<GrayMap> maps{noise_map(320, 240, 2)};
  const std::vector<BinaryMask> gts{ellipse(320, 240)};
  for (auto _ : state) benchmark::DoNotOptimize(pr_curve(maps, gts));
}
BENCHMARK(BM_PrCurve);

void BM_ExtractFeatures(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const BinaryMask mask = ellipse(side, side * 3 / 4);
  const GrayMap energy = noise_map(side, side * 3 / 4, 3);
  for (auto _ : state) benchmark::DoNotOptimize(extract_features(mask, energy));
}
BENCHMARK(BM_ExtractFeatures)->Arg(160)->Arg(320);

void BM_ObjectStats(benchmark::State& state) {
  const RgbImage img = noise_image(160, 120, 4);
  const BinaryMask mask = ellipse(160, 120);
  const GrayMap edges = default_edge_map(img);
  for (auto _ : state) benchmark::DoNotOptimize(object_stats(img, edges, mask));
}
BENCHMARK(BM_ObjectStats);

void BM_BuiltinProposals(benchmark::State& state) {
  const RgbImage img = noise_image(160, 120, 5);
  for (auto _ : state) benchmark::DoNotOptimize(builtin_proposals(img, 20, 1));
}
BENCHMARK(BM_BuiltinProposals)->Unit(benchmark::kMillisecond);

TrainingSet training_data(std::size_t rows) {
  Rng rng(6);
  TrainingSet d(kFeatureCount);
  std::vector<double> x(kFeatureCount);
  for (std::size_t i = 0; i < rows; ++i) {
    for (auto& v : x) v = rng.uniform();
    d.add(x, x[0] * x[1] + 0.3 * x[5] + 0.05 * rng.normal());
  }
  return d;
}

void BM_ForestTrain(benchmark::State& state) {
  const TrainingSet d = training_data(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Forest::train(d, ForestParams{}, 7));
}
BENCHMARK(BM_ForestTrain)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_ForestPredict(benchmark::State& state) {
  const TrainingSet d = training_data(2000);
  const Forest f = Forest::train(d, ForestParams{}, 7);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.predict(d.row(i)));
    i = (i + 1) % d.rows();
  }
}
BENCHMARK(BM_ForestPredict);

} // namespace
BENCHMARK_MAIN();
