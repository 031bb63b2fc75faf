// SPDX-License-Identifier: Apache-2.0

#include "voxforge/afford/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "voxforge/error.hpp"

namespace voxforge::afford {

double squared_distance(const Vec3& a, const Vec3& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return dx * dx + dy * dy + dz * dz;
}

KdTree::KdTree(const voxel::PointCloud& cloud) : points_(cloud.points().begin(), cloud.points().end()) {
    if (points_.empty()) throw DomainError("KdTree: empty cloud");
    nodes_.reserve(points_.size());
    std::vector<std::size_t> idx(points_.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    root_ = build(idx, 0, idx.size());
}

std::size_t KdTree::build(std::vector<std::size_t>& idx, std::size_t lo, std::size_t hi) {
    if (lo >= hi) return kNone;
    // Split on the axis of largest spread at the median.
    Vec3 mn = points_[idx[lo]];
    Vec3 mx = mn;
    for (std::size_t i = lo; i < hi; ++i) {
        const Vec3& p = points_[idx[i]];
        for (int a = 0; a < 3; ++a) {
            mn[a] = std::min(mn[a], p[a]);
            mx[a] = std::max(mx[a], p[a]);
        }
    }
    int axis = 0;
    for (int a = 1; a < 3; ++a)
        if (mx[a] - mn[a] > mx[axis] - mn[axis]) axis = a;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::nth_element(idx.begin() + static_cast<long>(lo), idx.begin() + static_cast<long>(mid),
                     idx.begin() + static_cast<long>(hi), [&](std::size_t a, std::size_t b) {
                         const double pa = points_[a][axis];
                         const double pb = points_[b][axis];
                         return pa < pb || (pa == pb && a < b);
                     });
    const std::size_t self = nodes_.size();
    nodes_.push_back({idx[mid], axis, kNone, kNone});
    const std::size_t l = build(idx, lo, mid);
    const std::size_t r = build(idx, mid + 1, hi);
    nodes_[self].left = l;
    nodes_[self].right = r;
    return self;
}

void KdTree::search(std::size_t node, const Vec3& q, Neighbor& best) const {
    if (node == kNone) return;
    const Node& n = nodes_[node];
    const double d = squared_distance(q, points_[n.point]);
    if (d < best.squared_distance || (d == best.squared_distance && n.point < best.index)) best = {n.point, d};
    const double delta = q[n.axis] - points_[n.point][n.axis];
    search(delta < 0 ? n.left : n.right, q, best);
    // The far side can only help when the splitting plane is within the
    // best radius found on the near side. Equality still visits it so ties
    // resolve to the smaller index.
    if (delta * delta <= best.squared_distance) search(delta < 0 ? n.right : n.left, q, best);
}

Neighbor KdTree::nearest(const Vec3& q) const {
    Neighbor best{kNone, std::numeric_limits<double>::infinity()};
    search(root_, q, best);
    return best;
}

}  // namespace voxforge::afford
