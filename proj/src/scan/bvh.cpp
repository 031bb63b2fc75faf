// SPDX-License-Identifier: Apache-2.0

#include "voxforge/scan/bvh.hpp"

#include <algorithm>
#include <numeric>

namespace voxforge::scan {

std::optional<double> intersect_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b,
                                         const Vec3& c) {
    constexpr double kEps = 1e-12;
    const Vec3 e1 = b - a;
    const Vec3 e2 = c - a;
    const Vec3 p = cross(dir, e2);
    const double det = dot(e1, p);
    if (std::abs(det) < kEps * norm(e1) * norm(e2)) return std::nullopt;
    const double inv = 1.0 / det;
    const Vec3 s = origin - a;
    const double u = dot(s, p) * inv;
    if (u < 0.0 || u > 1.0) return std::nullopt;
    const Vec3 q = cross(s, e1);
    const double v = dot(dir, q) * inv;
    if (v < 0.0 || u + v > 1.0) return std::nullopt;
    const double t = dot(e2, q) * inv;
    if (t <= kEps) return std::nullopt;
    return t;
}

namespace {

constexpr std::uint32_t kLeafSize = 4;

bool ray_box(const Vec3& o, const Vec3& inv_d, const Vec3& lo, const Vec3& hi, double t_limit) {
    double t0 = 0.0;
    double t1 = t_limit;
    for (int a = 0; a < 3; ++a) {
        double ta = (lo[a] - o[a]) * inv_d[a];
        double tb = (hi[a] - o[a]) * inv_d[a];
        if (ta > tb) std::swap(ta, tb);
        // NaN from 0 * inf means the ray lies in the slab plane; treat as inside.
        if (ta == ta) t0 = std::max(t0, ta);
        if (tb == tb) t1 = std::min(t1, tb);
        if (t0 > t1) return false;
    }
    return true;
}

}  // namespace

Bvh::Bvh(const TriangleMesh& mesh) : mesh_(&mesh) {
    const auto n = static_cast<std::uint32_t>(mesh.triangles().size());
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0U);
    centroids_.resize(n);
    for (std::uint32_t t = 0; t < n; ++t) {
        const auto c = mesh.corners(t);
        centroids_[t] = (c[0] + c[1] + c[2]) * (1.0 / 3.0);
    }
    nodes_.reserve(2 * n / kLeafSize + 2);
    if (n > 0) build(0, n);
}

std::uint32_t Bvh::build(std::uint32_t begin, std::uint32_t end) {
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({});
    Vec3 lo{1e300, 1e300, 1e300};
    Vec3 hi{-1e300, -1e300, -1e300};
    Vec3 clo = lo;
    Vec3 chi = hi;
    for (std::uint32_t i = begin; i < end; ++i) {
        for (const auto& p : mesh_->corners(order_[i])) {
            for (int a = 0; a < 3; ++a) {
                lo[a] = std::min(lo[a], p[a]);
                hi[a] = std::max(hi[a], p[a]);
            }
        }
        const Vec3& c = centroids_[order_[i]];
        for (int a = 0; a < 3; ++a) {
            clo[a] = std::min(clo[a], c[a]);
            chi[a] = std::max(chi[a], c[a]);
        }
    }
    nodes_[id].lo = lo;
    nodes_[id].hi = hi;
    if (end - begin <= kLeafSize) {
        nodes_[id].first = begin;
        nodes_[id].count = end - begin;
        return id;
    }
    int axis = 0;
    const Vec3 span = chi - clo;
    if (span.y > span[axis]) axis = 1;
    if (span.z > span[axis]) axis = 2;
    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t x, std::uint32_t y) {
                         const double cx = centroids_[x][axis];
                         const double cy = centroids_[y][axis];
                         return cx < cy || (cx == cy && x < y);
                     });
    const std::uint32_t left = build(begin, mid);
    const std::uint32_t right = build(mid, end);
    nodes_[id].first = left;
    nodes_[id].right = right;
    nodes_[id].count = 0;
    return id;
}

std::optional<RayHit> Bvh::closest_hit(const Vec3& origin, const Vec3& dir, double max_t) const {
    if (nodes_.empty()) return std::nullopt;
    const Vec3 inv{1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z};
    std::optional<RayHit> best;
    double limit = max_t;
    std::uint32_t stack[64];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Node& node = nodes_[stack[--top]];
        if (!ray_box(origin, inv, node.lo, node.hi, limit)) continue;
        if (node.count > 0) {
            for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
                const std::uint32_t tri = order_[i];
                const auto c = mesh_->corners(tri);
                if (auto t = intersect_triangle(origin, dir, c[0], c[1], c[2])) {
                    if (*t < limit || (*t == limit && best && tri < best->triangle)) {
                        limit = *t;
                        best = RayHit{*t, tri};
                    }
                }
            }
        } else {
            stack[top++] = node.first;
            stack[top++] = node.right;
        }
    }
    return best;
}

}  // namespace voxforge::scan
