// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "voxforge/scan/bvh.hpp"
#include "voxforge/scan/camera.hpp"
#include "voxforge/scan/mesh.hpp"
#include "voxforge/voxel/point_cloud.hpp"

namespace voxforge::scan {

// Row-major range image; no-hit pixels hold NaN.
struct DepthImage {
    int width{0};
    int height{0};
    std::vector<float> depth;

    static constexpr float kNoHit = std::numeric_limits<float>::quiet_NaN();
    static bool is_hit(float d) { return std::isfinite(d); }

    float at(int u, int v) const { return depth[static_cast<std::size_t>(v) * width + u]; }
    std::size_t hit_count() const;
};

// Euclidean range to the nearest surface along each pixel ray. Rows are
// rendered in parallel; every pixel is computed independently so the image
// does not depend on the thread schedule.
DepthImage render_depth(const TriangleMesh& mesh, const Camera& cam);
DepthImage render_depth(const Bvh& bvh, const Camera& cam);

// Single-threaded brute-force renderer (every ray against every triangle).
// Kept as the reference the BVH/OpenMP path is tested against.
DepthImage render_depth_reference(const TriangleMesh& mesh, const Camera& cam);

// One world point per finite pixel: position + depth * ray_direction(u, v).
voxel::PointCloud backproject(const DepthImage& img, const Camera& cam);

// "DPT1": magic, u32 width, u32 height, then width*height f32 row-major,
// little-endian, NaN for no hit.
void write_dpt(std::ostream& out, const DepthImage& img);
DepthImage read_dpt(std::istream& in);
void save_dpt(const std::filesystem::path& path, const DepthImage& img);
DepthImage load_dpt(const std::filesystem::path& path);

}  // namespace voxforge::scan
