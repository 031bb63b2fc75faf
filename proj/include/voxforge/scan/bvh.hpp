// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "voxforge/scan/mesh.hpp"

namespace voxforge::scan {

struct RayHit {
    double t{0.0};
    std::uint32_t triangle{0};
};

// Moller-Trumbore; returns t > eps of the hit or nullopt.
std::optional<double> intersect_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b,
                                         const Vec3& c);

// Median-split bounding volume hierarchy over a mesh's triangles. Immutable
// after construction and safe to query from many threads.
class Bvh {
public:
    explicit Bvh(const TriangleMesh& mesh);

    const TriangleMesh& mesh() const { return *mesh_; }

    // Nearest hit with t in (0, max_t). Ties resolve to the lowest triangle
    // index, so the result is independent of traversal order.
    std::optional<RayHit> closest_hit(const Vec3& origin, const Vec3& dir,
                                      double max_t = std::numeric_limits<double>::infinity()) const;

private:
    struct Node {
        Vec3 lo;
        Vec3 hi;
        std::uint32_t first{0};  // leaf: first index into order_; inner: left child
        std::uint32_t count{0};  // leaf triangle count, 0 for inner nodes
        std::uint32_t right{0};
    };

    std::uint32_t build(std::uint32_t begin, std::uint32_t end);

    const TriangleMesh* mesh_;
    std::vector<Node> nodes_;
    std::vector<std::uint32_t> order_;
    std::vector<Vec3> centroids_;
};

}  // namespace voxforge::scan
