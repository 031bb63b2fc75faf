// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <sstream>

#include "support/random.hpp"
#include "voxforge/error.hpp"
#include "voxforge/voxel/convert.hpp"
#include "voxforge/voxel/grid_ray.hpp"
#include "voxforge/voxel/io.hpp"
#include "voxforge/voxel/metrics.hpp"

using namespace voxforge;
using namespace voxforge::voxel;

namespace {

const Frame kUnitFrame{Dims{4, 3, 2}, {0.0, 0.0, 0.0}, 1.0};

VoxelGrid grid_with(std::initializer_list<Index3> cells, const Frame& f = kUnitFrame) {
    VoxelGrid g(f);
    for (const auto& c : cells) g.set(c);
    return g;
}

}  // namespace

TEST_CASE("iou on hand-enumerated grids") {
    const auto a = grid_with({{0, 0, 0}, {1, 0, 0}});
    const auto b = grid_with({{0, 0, 0}});
    CHECK(iou(a, a) == 1.0);
    CHECK(iou(a, b) == 0.5);
    CHECK(iou(grid_with({{0, 0, 0}}), grid_with({{3, 2, 1}})) == 0.0);
}

TEST_CASE("hit rate counts missed truth voxels") {
    CHECK(hit_rate(grid_with({{0, 0, 0}, {1, 1, 1}}), grid_with({{0, 0, 0}})) == 1.0);
    CHECK(hit_rate(grid_with({{0, 0, 0}}), grid_with({{0, 0, 0}, {1, 0, 0}})) == 0.5);
    CHECK(hit_rate(grid_with({{0, 0, 0}}), grid_with({{1, 0, 0}})) == 0.5);
}

TEST_CASE("accuracy counts spurious reconstruction voxels") {
    CHECK(accuracy(grid_with({{0, 0, 0}}), grid_with({{0, 0, 0}, {1, 1, 1}})) == 1.0);
    CHECK(accuracy(grid_with({{0, 0, 0}, {1, 0, 0}}), grid_with({{0, 0, 0}})) == 0.5);
    const auto g = grid_with({{2, 1, 0}, {3, 2, 1}});
    CHECK(accuracy(g, g) == 1.0);
}

TEST_CASE("metrics reject mismatched frames and empty unions") {
    const auto a = grid_with({{0, 0, 0}});
    const VoxelGrid other(Frame{Dims{4, 3, 2}, {0.5, 0.0, 0.0}, 1.0});
    CHECK_THROWS_AS(iou(a, other), ShapeError);
    const VoxelGrid sized(Frame{Dims{4, 3, 2}, {0.0, 0.0, 0.0}, 0.5});
    CHECK_THROWS_AS(hit_rate(a, sized), ShapeError);
    const VoxelGrid empty(kUnitFrame);
    CHECK_THROWS_AS(accuracy(empty, empty), DomainError);
}

TEST_CASE("metric properties on random grids") {
    testing::Rng rng(7);
    const Frame f{Dims{5, 7, 3}, {-1.0, 2.0, 0.0}, 0.25};
    for (int trial = 0; trial < 100; ++trial) {
        const double density = testing::uniform(rng, 0.05, 0.9);
        const auto r = testing::random_grid(rng, f, density);
        const auto t = testing::random_grid(rng, f, density);
        if ((r | t).empty()) continue;
        const auto m = evaluate(r, t);
        CHECK(m.counts.intersection + m.counts.false_negative + m.counts.false_positive == m.counts.union_);
        CHECK(m.iou <= m.hit_rate);
        CHECK(m.iou <= m.accuracy);
        if (!r.empty()) {
            CHECK(iou(r, r) == 1.0);
            CHECK(hit_rate(r, r) == 1.0);
            CHECK(accuracy(r, r) == 1.0);
        }
        // A simultaneous permutation of voxel indices leaves every metric unchanged.
        std::vector<std::size_t> perm(r.size());
        std::iota(perm.begin(), perm.end(), 0U);
        std::shuffle(perm.begin(), perm.end(), rng);
        VoxelGrid rp(f);
        VoxelGrid tp(f);
        for (std::size_t n = 0; n < perm.size(); ++n) {
            rp.set(perm[n], r.test(n));
            tp.set(perm[n], t.test(n));
        }
        const auto mp = evaluate(rp, tp);
        CHECK(mp.counts == m.counts);
        CHECK(mp.iou == m.iou);
    }
}

TEST_CASE("voxelize bins with half-open cells") {
    const Frame f{Dims{4, 4, 4}, {0.0, 0.0, 0.0}, 0.5};
    SUBCASE("point at a voxel center") {
        const auto r = voxelize(PointCloud({{0.75, 0.25, 1.25}}), f);
        CHECK(r.grid.count() == 1);
        CHECK(r.grid.test(Index3{1, 0, 2}));
        CHECK(r.dropped == 0);
    }
    SUBCASE("empty cloud") {
        const auto r = voxelize(PointCloud{}, f);
        CHECK(r.grid.empty());
    }
    SUBCASE("internal boundary goes to the higher index") {
        // x = 1.0 is the face between voxel 1 ([0.5, 1.0)) and voxel 2 ([1.0, 1.5)).
        const auto r = voxelize(PointCloud({{1.0, 0.1, 0.1}}), f);
        CHECK(r.grid.test(Index3{2, 0, 0}));
        CHECK_FALSE(r.grid.test(Index3{1, 0, 0}));
    }
    SUBCASE("out of bounds points are dropped and counted") {
        const auto r = voxelize(PointCloud({{2.0, 0.1, 0.1}, {-0.01, 0.0, 0.0}, {0.1, 0.1, 0.1}}), f);
        CHECK(r.dropped == 2);
        CHECK(r.grid.count() == 1);
    }
}

TEST_CASE("devoxelize returns voxel centers") {
    const Frame f{Dims{2, 2, 2}, {0.0, 0.0, 0.0}, 1.0};
    CHECK(devoxelize(VoxelGrid(f)).empty());
    const auto cloud = devoxelize(grid_with({{0, 0, 0}}, f));
    REQUIRE(cloud.size() == 1);
    CHECK(cloud[0] == Vec3{0.5, 0.5, 0.5});

    testing::Rng rng(3);
    const Frame g{Dims{6, 5, 4}, {-0.3, 0.1, 2.0}, 0.07};
    for (int trial = 0; trial < 20; ++trial) {
        const auto grid = testing::random_grid(rng, g, 0.3);
        CHECK(voxelize(devoxelize(grid), g).grid == grid);
    }
}

TEST_CASE("VXG1 layout is bit-exact") {
    const Frame f{Dims{3, 2, 2}, {1.0, -2.0, 0.5}, 0.25};
    const auto grid = grid_with({{0, 0, 0}, {2, 1, 1}, {1, 0, 1}}, f);
    std::stringstream ss;
    write_vxg(ss, grid);
    const std::string bytes = ss.str();
    REQUIRE(bytes.size() == 4 + 12 + 32 + 2);
    CHECK(bytes.substr(0, 4) == "VXG1");
    CHECK(static_cast<unsigned char>(bytes[4]) == 3);
    CHECK(static_cast<unsigned char>(bytes[8]) == 2);
    // Linear indices 0, 7 and 11 (x-fastest), LSB first.
    CHECK(static_cast<unsigned char>(bytes[48]) == 0b1000'0001);
    CHECK(static_cast<unsigned char>(bytes[49]) == 0b0000'1000);
    CHECK(read_vxg(ss) == grid);

    std::stringstream bad("VXG2");
    CHECK_THROWS_AS(read_vxg(bad), IoError);
    std::stringstream truncated(bytes.substr(0, 30));
    CHECK_THROWS_AS(read_vxg(truncated), IoError);
}

TEST_CASE("PLY round trip and malformed input") {
    testing::Rng rng(11);
    const auto cloud = testing::random_cloud(rng, 50);
    std::stringstream ss;
    write_ply(ss, cloud);
    CHECK(read_ply(ss) == cloud);

    std::stringstream extra(
        "ply\nformat ascii 1.0\ncomment test\nelement vertex 2\nproperty float x\nproperty float y\n"
        "property float z\nproperty uchar red\nend_header\n1 2 3 255\n4 5 6 0\n");
    const auto two = read_ply(extra);
    REQUIRE(two.size() == 2);
    CHECK(two[1] == Vec3{4, 5, 6});

    std::stringstream binary("ply\nformat binary_little_endian 1.0\nend_header\n");
    CHECK_THROWS_AS(read_ply(binary), IoError);
    std::stringstream short_data("ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\n"
                                 "property float z\nend_header\n1 2 3\n");
    CHECK_THROWS_AS(read_ply(short_data), IoError);
}

TEST_CASE("grid ray casting finds the first occupied voxel") {
    const Frame f{Dims{8, 8, 8}, {0.0, 0.0, 0.0}, 1.0};
    const auto g = grid_with({{5, 3, 3}, {7, 3, 3}}, f);
    const auto hit = cast_ray(g, {-2.0, 3.5, 3.5}, {1.0, 0.0, 0.0}, 100.0);
    REQUIRE(hit);
    CHECK(hit->voxel == Index3{5, 3, 3});
    CHECK(hit->t == doctest::Approx(7.0));
    CHECK_FALSE(cast_ray(g, {-2.0, 3.5, 3.5}, {1.0, 0.0, 0.0}, 6.5));
    CHECK_FALSE(cast_ray(g, {-2.0, 2.5, 3.5}, {1.0, 0.0, 0.0}, 100.0));
    const auto back = cast_ray(g, {20.0, 3.5, 3.5}, {-1.0, 0.0, 0.0}, 100.0);
    REQUIRE(back);
    CHECK(back->voxel == Index3{7, 3, 3});

    // Diagonal rays agree with dense sampling along the ray.
    testing::Rng rng(5);
    const auto dense = testing::random_grid(rng, f, 0.05);
    for (int trial = 0; trial < 200; ++trial) {
        const Vec3 o{testing::uniform(rng, -1, 9), testing::uniform(rng, -1, 9), testing::uniform(rng, -1, 9)};
        const Vec3 d = normalized(Vec3{testing::uniform(rng, -1, 1), testing::uniform(rng, -1, 1),
                                       testing::uniform(rng, -1, 1)});
        const auto h = cast_ray(dense, o, d, 30.0);
        std::optional<Index3> sampled;
        for (double t = 0.0; t <= 30.0; t += 1e-3) {
            if (auto i = f.locate(o + t * d); i && dense.test(*i)) {
                sampled = i;
                break;
            }
        }
        REQUIRE(h.has_value() == sampled.has_value());
        if (h) CHECK(h->voxel == *sampled);
    }
}
