#include <benchmark/benchmark.h>

#include <random>

#include "flowplan/constrain.hpp"
#include "flowplan/geom.hpp"
#include "flowplan/net.hpp"
#include "flowplan/sampler.hpp"
#include "flowplan/traj.hpp"

using namespace flowplan;

namespace {

geom::Scenario bench_scenario() {
    return geom::build_scenario({geom::RoadKind::CurveLeft, 6.0, 60.0, 20.0});
}

traj::Trajectory random_traj(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    traj::Trajectory t;
    for (int i = 0; i < n; ++i) t.push_back({u(rng), u(rng)});
    return t;
}

}  // namespace

static void BM_Esdf(benchmark::State& state) {
    auto s = bench_scenario();
    auto mask = geom::rasterize_road(s, 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(geom::compute_esdf(mask));
    state.SetItemsProcessed(state.iterations() * mask.cells.size());
}
BENCHMARK(BM_Esdf);

static void BM_Forward(benchmark::State& state) {
    net::ArchConfig arch;
    auto params = net::init_params(arch, 1);
    std::vector<double> x(arch.in_dim(), 0.1);
    for (auto _ : state)
        benchmark::DoNotOptimize(net::forward(params, x, 0.5, net::all_absent()));
}
BENCHMARK(BM_Forward);

static void BM_Backward(benchmark::State& state) {
    net::ArchConfig arch;
    auto params = net::init_params(arch, 1);
    std::vector<net::Sample> batch(state.range(0));
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& s : batch) {
        s.x.resize(arch.in_dim());
        s.target.resize(arch.out_dim());
        for (double& v : s.x) v = u(rng);
        for (double& v : s.target) v = u(rng);
        s.t = 0.5;
    }
    for (auto _ : state) benchmark::DoNotOptimize(net::backward(params, batch));
    state.SetItemsProcessed(state.iterations() * batch.size());
}
BENCHMARK(BM_Backward)->Arg(1)->Arg(64);

static void BM_Dtw(benchmark::State& state) {
    std::mt19937_64 rng(3);
    auto a = random_traj(state.range(0), rng);
    auto b = random_traj(state.range(0), rng);
    for (auto _ : state) benchmark::DoNotOptimize(traj::dtw_distance(a, b));
}
BENCHMARK(BM_Dtw)->Arg(8)->Arg(64);

static void BM_SampleTrajectory(benchmark::State& state) {
    net::ArchConfig arch;
    auto params = net::init_params(arch, 1);
    auto s = bench_scenario();
    auto field = geom::compute_esdf(geom::rasterize_road(s, 0.5));
    traj::TrajectoryVocabulary vocab;
    std::mt19937_64 vrng(4);
    traj::Trajectory anchor;
    for (int i = 0; i < arch.t_points; ++i) anchor.push_back({2.0 + 4.0 * i, 0.0});
    vocab.anchors.push_back(anchor);
    sampler::SceneFields scene{&field, &vocab, {{-8.0, -32.0}, {72.0, 32.0}}};
    sampler::SamplerConfig cfg;
    cfg.steps = static_cast<int>(state.range(0));
    cfg.constraint.civ_enabled = true;
    cfg.constraint.cvf_enabled = true;
    cfg.constraint.energy_weight = 1.0;
    std::mt19937_64 rng(5);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            sampler::sample_trajectory(params, net::all_absent(), scene, cfg, rng));
}
BENCHMARK(BM_SampleTrajectory)->Arg(20)->Arg(100);

BENCHMARK_MAIN();
