#include <benchmark/benchmark.h>

#include <vector>

#include "ctr/harmonic.hpp"
#include "ctr/labelgen.hpp"
#include "ctr/postproc.hpp"
#include "ctr/svm.hpp"
#include "ctr/synth.hpp"

using namespace ctr;

namespace {

Polygon bench_ribbon() { return generate_ribbon({150, 30, 1.2, 24, 9}); }

const GeoFeatureMap& bench_labels() {
  static const GeoFeatureMap map = [] {
    const Polygon ribbon = bench_ribbon();
    const Vec2 hi = ribbon.bbox_max();
    const std::vector<Polygon> instances{ribbon};
    return rasterize_labels(int(hi.x) + 8, int(hi.y) + 8, instances);
  }();
  return map;
}

}  // namespace

static void BM_Triangulate(benchmark::State& state) {
  const Polygon ribbon = bench_ribbon();
  const double max_area = ribbon.area() / double(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(triangulate(ribbon, max_area));
}
BENCHMARK(BM_Triangulate)->Arg(500)->Arg(2000)->Arg(8000);

static void BM_BuildCtr(benchmark::State& state) {
  const Polygon ribbon = bench_ribbon();
  for (auto _ : state) benchmark::DoNotOptimize(build_ctr(ribbon));
}
BENCHMARK(BM_BuildCtr);

static void BM_RasterizeLabels(benchmark::State& state) {
  const Polygon ribbon = bench_ribbon();
  const Vec2 hi = ribbon.bbox_max();
  const std::vector<Polygon> instances{ribbon};
  for (auto _ : state)
    benchmark::DoNotOptimize(rasterize_labels(int(hi.x) + 8, int(hi.y) + 8, instances));
}
BENCHMARK(BM_RasterizeLabels);

static void BM_Detect(benchmark::State& state) {
  const GeoFeatureMap& labels = bench_labels();
  PostprocConfig cfg;
  cfg.kernel_scale = double(state.range(0)) / 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(detect(labels, cfg));
}
BENCHMARK(BM_Detect)->Arg(0)->Arg(4);

static void BM_PolygonIou(benchmark::State& state) {
  const Polygon a = bench_ribbon();
  const Polygon b = transform_polygon(a, 0.05, {4, 2});
  for (auto _ : state) benchmark::DoNotOptimize(polygon_iou(a, b));
}
BENCHMARK(BM_PolygonIou);

static void BM_SvmPredict(benchmark::State& state) {
  std::vector<Features> x;
  std::vector<int> y;
  for (int i = 0; i < 200; ++i) {
    x.push_back({0.6 + 0.002 * i, 0.1 + 0.001 * i, i % 2 ? 3.0 : 0.5});
    y.push_back(i % 2 ? 1 : -1);
  }
  const SvmModel model = train_smo(x, y, 10.0, 0.1);
  const Features probe{0.8, 0.2, 2.0};
  for (auto _ : state) benchmark::DoNotOptimize(predict(model, probe));
}
BENCHMARK(BM_SvmPredict);

BENCHMARK_MAIN();
