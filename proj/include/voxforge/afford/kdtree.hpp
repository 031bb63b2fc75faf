// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "voxforge/voxel/point_cloud.hpp"

namespace voxforge::afford {

struct Neighbor {
    std::size_t index{0};
    double squared_distance{0.0};
};

// Balanced 3-d tree over a copy of the cloud's points. Immutable once
// built, so concurrent queries are safe.
class KdTree {
public:
    // Throws DomainError on an empty cloud.
    explicit KdTree(const voxel::PointCloud& cloud);

    // Exact nearest neighbor; the squared distance is computed exactly as
    // (dx*dx + dy*dy) + dz*dz, so it matches a brute-force scan bit for bit.
    Neighbor nearest(const Vec3& q) const;
    std::size_t size() const { return points_.size(); }
    const Vec3& point(std::size_t i) const { return points_[i]; }

private:
    struct Node {
        std::size_t point;  // index into points_
        int axis;
        std::size_t left;   // kNone when absent
        std::size_t right;
    };
    static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

    std::size_t build(std::vector<std::size_t>& idx, std::size_t lo, std::size_t hi);
    void search(std::size_t node, const Vec3& q, Neighbor& best) const;

    std::vector<Vec3> points_;
    std::vector<Node> nodes_;
    std::size_t root_{kNone};
};

double squared_distance(const Vec3& a, const Vec3& b);

}  // namespace voxforge::afford
