#include <benchmark/benchmark.h>

#include <random>

#include "tgrasp/nnet/layers.hpp"
#include "tgrasp/nnet/model.hpp"
#include "tgrasp/render.hpp"
#include "tgrasp/tactile.hpp"

using namespace tgrasp;
using namespace tgrasp::nnet;

static void BM_Conv2dForward(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  Conv2d<float> conv("c", 16, 32, 3, 1, 1);
  std::mt19937_64 rng(1);
  conv.init(rng);
  Tensor<float> x(1, 16, size, size);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  for (auto& v : x.data) v = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(conv.forward(x));
}
BENCHMARK(BM_Conv2dForward)->Arg(24)->Arg(48);

static void BM_ModelForward(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  Tgcnn<float> m;
  m.init(1);
  m.set_training(false);
  Tensor<float> x(1, 3, size, size);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  for (auto& v : x.data) v = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(m.forward(x));
}
BENCHMARK(BM_ModelForward)->Arg(64)->Arg(96);

static void BM_RenderScene(benchmark::State& state) {
  SceneSpec spec;
  spec.object_count = 3;
  Scene scene = generate_scene(spec, 7);
  CameraModel cam =
      make_overhead_camera(700.0, 0.0, static_cast<int>(state.range(0)),
                           static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(render_rgb(scene, cam));
}
BENCHMARK(BM_RenderScene)->Arg(96)->Arg(192);

static void BM_MinEnclosingCircle(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  std::vector<Vec2> pts(static_cast<size_t>(state.range(0)));
  for (auto& p : pts) p = {u(rng), u(rng)};
  for (auto _ : state) benchmark::DoNotOptimize(min_enclosing_circle(pts));
}
BENCHMARK(BM_MinEnclosingCircle)->Arg(100)->Arg(1000);

static void BM_TactileSense(benchmark::State& state) {
  SceneSpec spec;
  spec.object_count = 1;
  Scene scene = generate_scene(spec, 5);
  GripperSpec g;
  const Vec2 p = scene.objects[0].centroid();
  for (auto _ : state)
    benchmark::DoNotOptimize(sense(scene, g, p, 10.0, 11));
}
BENCHMARK(BM_TactileSense);

BENCHMARK_MAIN();
