// SPDX-License-Identifier: Apache-2.0

#include "voxforge/afford/chamfer.hpp"

#include <limits>
#include <vector>

#include "voxforge/error.hpp"

namespace voxforge::afford {

namespace {

void require_points(const voxel::PointCloud& a, const voxel::PointCloud& b) {
    if (a.empty() || b.empty()) throw DomainError("chamfer: empty point cloud");
}

// Nearest distances are found in parallel; the sum runs serially in point
// order so the result does not depend on the thread count.
double directed(const voxel::PointCloud& from, const KdTree& to) {
    const std::size_t n = from.size();
    std::vector<double> d(n);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) d[i] = to.nearest(from[i]).squared_distance;
    double total = 0.0;
    for (double v : d) total += v;
    return total;
}

}  // namespace

double chamfer(const voxel::PointCloud& a, const KdTree& tree_a, const voxel::PointCloud& b, const KdTree& tree_b) {
    require_points(a, b);
    if (tree_a.size() != a.size() || tree_b.size() != b.size()) throw ShapeError("chamfer: tree does not match cloud");
    return directed(a, tree_b) + directed(b, tree_a);
}

double chamfer(const voxel::PointCloud& a, const voxel::PointCloud& b) {
    require_points(a, b);
    return chamfer(a, KdTree(a), b, KdTree(b));
}

double chamfer_normalized(const voxel::PointCloud& a, const voxel::PointCloud& b) {
    return chamfer(a, b) / static_cast<double>(a.size() + b.size());
}

namespace reference {

namespace {

double directed(const voxel::PointCloud& from, const voxel::PointCloud& to) {
    double total = 0.0;
    for (const auto& p : from.points()) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& q : to.points()) best = std::min(best, squared_distance(p, q));
        total += best;
    }
    return total;
}

}  // namespace

double chamfer(const voxel::PointCloud& a, const voxel::PointCloud& b) {
    require_points(a, b);
    return directed(a, b) + directed(b, a);
}

}  // namespace reference

}  // namespace voxforge::afford
