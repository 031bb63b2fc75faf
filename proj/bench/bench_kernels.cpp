// SPDX-License-Identifier: Apache-2.0
//
// OpenMP kernels against their serial references. Set OMP_NUM_THREADS to
// compare thread counts.

#include <benchmark/benchmark.h>

#include <vector>

#include "voxforge/afford/chamfer.hpp"
#include "voxforge/afford/toy_kb.hpp"
#include "voxforge/kernels/conv3d.hpp"
#include "voxforge/kernels/dense.hpp"
#include "voxforge/scan/bvh.hpp"
#include "voxforge/scan/render.hpp"
#include "voxforge/scan/shapes.hpp"
#include "voxforge/util/random.hpp"

using namespace voxforge;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
    util::Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = util::uniform(rng, -1.0, 1.0);
    return v;
}

// First encoder layer at 32^3 and a mid-network layer.
kernels::ConvGeometry conv_case(int which) {
    kernels::ConvGeometry g;
    if (which == 0) {
        g.c_in = 1, g.c_out = 8, g.d = g.h = g.w = 32;
    } else {
        g.c_in = 16, g.c_out = 32, g.d = g.h = g.w = 8;
    }
    g.k = 4, g.stride = 2, g.pad = 1;
    return g;
}

template <auto Kernel>
void conv_forward(benchmark::State& state) {
    const auto g = conv_case(static_cast<int>(state.range(0)));
    const auto x = noise(g.input_size(), 1), w = noise(g.weight_size(), 2), b = noise(g.c_out, 3);
    std::vector<double> y(g.output_size());
    for (auto _ : state) {
        Kernel(g, x, w, b, y);
        benchmark::DoNotOptimize(y.data());
    }
}

template <auto Kernel>
void conv_backward_input(benchmark::State& state) {
    const auto g = conv_case(static_cast<int>(state.range(0)));
    const auto gy = noise(g.output_size(), 1), w = noise(g.weight_size(), 2);
    std::vector<double> gx(g.input_size());
    for (auto _ : state) {
        Kernel(g, gy, w, gx);
        benchmark::DoNotOptimize(gx.data());
    }
}

template <auto Kernel>
void dense_forward(benchmark::State& state) {
    const std::size_t n = 64, in = 512, out = 256;
    const auto x = noise(n * in, 1), w = noise(in * out, 2), b = noise(out, 3);
    std::vector<double> y(n * out);
    for (auto _ : state) {
        Kernel(n, in, out, x, w, b, y);
        benchmark::DoNotOptimize(y.data());
    }
}

const scan::TriangleMesh& torus() {
    static const auto mesh = scan::shapes::torus(0.1, 0.04, 48, 24);
    return mesh;
}

scan::Camera camera() {
    return scan::hemisphere_views(5, 1.6, {0.0, 0.0, 0.0}, 0.25, 64)[2];
}

void render_bvh(benchmark::State& state) {
    const scan::Bvh bvh(torus());
    const auto cam = camera();
    for (auto _ : state) benchmark::DoNotOptimize(scan::render_depth(bvh, cam).depth.data());
}

void render_reference(benchmark::State& state) {
    const auto cam = camera();
    for (auto _ : state) benchmark::DoNotOptimize(scan::render_depth_reference(torus(), cam).depth.data());
}

std::pair<voxel::PointCloud, voxel::PointCloud> clouds(std::size_t n) {
    util::Rng rng(7);
    return {afford::sample_surface(scan::shapes::cube(0.1), n, rng),
            afford::sample_surface(scan::shapes::uv_sphere(0.06), n, rng)};
}

void chamfer_kdtree(benchmark::State& state) {
    const auto [a, b] = clouds(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(afford::chamfer(a, b));
}

void chamfer_reference(benchmark::State& state) {
    const auto [a, b] = clouds(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(afford::reference::chamfer(a, b));
}

}  // namespace

BENCHMARK(conv_forward<kernels::parallel::conv3d_forward>)->Name("conv3d_forward/parallel")->Arg(0)->Arg(1);
BENCHMARK(conv_forward<kernels::reference::conv3d_forward>)->Name("conv3d_forward/reference")->Arg(0)->Arg(1);
BENCHMARK(conv_backward_input<kernels::parallel::conv3d_backward_input>)
    ->Name("conv3d_backward_input/parallel")->Arg(0)->Arg(1);
BENCHMARK(conv_backward_input<kernels::reference::conv3d_backward_input>)
    ->Name("conv3d_backward_input/reference")->Arg(0)->Arg(1);
BENCHMARK(dense_forward<kernels::parallel::linear_forward>)->Name("linear_forward/parallel");
BENCHMARK(dense_forward<kernels::reference::linear_forward>)->Name("linear_forward/reference");
BENCHMARK(render_bvh)->Name("render_depth/bvh_parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(render_reference)->Name("render_depth/reference")->Unit(benchmark::kMillisecond);
BENCHMARK(chamfer_kdtree)->Name("chamfer/kdtree_parallel")->Arg(1000)->Arg(4000);
BENCHMARK(chamfer_reference)->Name("chamfer/reference")->Arg(1000)->Arg(4000);

BENCHMARK_MAIN();
