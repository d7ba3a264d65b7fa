#include <benchmark/benchmark.h>

#include <numbers>
#include <random>

#include "raic/controllers.hpp"
#include "raic/geometry.hpp"
#include "raic/harness.hpp"
#include "raic/terrain.hpp"
#include "raic/trajectory.hpp"

namespace {

using namespace raic;

Pose random_pose(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(-1.0, 1.0), pos(-0.5, 0.5);
  return Pose{compose_euler(angle(rng), angle(rng), angle(rng)), Vec3(pos(rng), pos(rng), pos(rng))};
}

void BM_PoseDifference(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const Pose a = random_pose(rng), b = random_pose(rng);
  for (auto _ : state) benchmark::DoNotOptimize(pose_difference(a, b));
}
BENCHMARK(BM_PoseDifference);

void BM_PoseIntegrate(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const Pose b = random_pose(rng);
  PoseDelta d;
  d.rotational = Vec3(0.1, -0.2, 0.3);
  d.translational = Vec3(0.01, 0.02, -0.03);
  for (auto _ : state) benchmark::DoNotOptimize(pose_integrate(b, d));
}
BENCHMARK(BM_PoseIntegrate);

void BM_GeneratePlan(benchmark::State& state) {
  PdsParams pds;
  PrimitiveParams prim = tuned_primitives();
  prim.dive = static_cast<double>(state.range(0)) / 100.0;
  for (auto _ : state) benchmark::DoNotOptimize(generate_plan(pds, prim));
}
BENCHMARK(BM_GeneratePlan)->Arg(0)->Arg(50)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_RaicStep(benchmark::State& state) {
  PdsParams pds;
  const TrajectoryPlan plan = generate_plan(pds, tuned_primitives());
  Controller ctl(ControllerKind::Raic, ImpedanceGains::defaults(), RaicGains::defaults(),
                 pds.sample_dt, plan[0].pose);
  Wrench w;
  w.force = Vec3(-20.0, 0.0, 10.0);
  std::size_t k = 0;
  for (auto _ : state) {
    const std::size_t i = k % (plan.size() - 1);
    benchmark::DoNotOptimize(ctl.step(plan[i].pose, plan[i + 1].pose, w));
    ++k;
  }
}
BENCHMARK(BM_RaicStep);

void BM_TerrainWrench(benchmark::State& state) {
  const TerrainModel model = terrain_preset(Material::Gravel);
  const TerrainState ground = make_terrain_state(model);
  const Pose scoop{compose_euler(0.1, -0.5, 0.05), Vec3(0.3, 0.0, -0.05)};
  Vec6 v = Vec6::Zero();
  v[0] = 0.05;
  for (auto _ : state) {
    benchmark::DoNotOptimize(terrain_wrench(ground, scoop, v, model, {}));
  }
}
BENCHMARK(BM_TerrainWrench);

void BM_Repetition(benchmark::State& state) {
  ScenarioConfig cfg;
  cfg.terrain = terrain_preset(Material::Slate);
  cfg.controller = state.range(0) ? ControllerKind::Raic : ControllerKind::Impedance;
  cfg.primitives = tuned_primitives();
  for (auto _ : state) benchmark::DoNotOptimize(run_repetition(cfg, 0, false));
}
BENCHMARK(BM_Repetition)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
