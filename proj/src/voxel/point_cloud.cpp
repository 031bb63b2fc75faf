// SPDX-License-Identifier: Apache-2.0

#include "voxforge/voxel/point_cloud.hpp"

#include <algorithm>

#include "voxforge/error.hpp"

namespace voxforge::voxel {

PointCloud::PointCloud(std::vector<Vec3> points) : points_(std::move(points)) {
    for (const auto& p : points_) {
        if (!is_finite(p)) throw DomainError("point cloud contains a non-finite coordinate");
    }
}

void PointCloud::push_back(const Vec3& p) {
    if (!is_finite(p)) throw DomainError("point cloud contains a non-finite coordinate");
    points_.push_back(p);
}

void PointCloud::append(const PointCloud& other) {
    points_.insert(points_.end(), other.points_.begin(), other.points_.end());
}

Vec3 PointCloud::centroid() const {
    if (points_.empty()) throw DomainError("centroid of an empty point cloud");
    Vec3 sum;
    for (const auto& p : points_) sum += p;
    return sum * (1.0 / static_cast<double>(points_.size()));
}

std::pair<Vec3, Vec3> PointCloud::bounds() const {
    if (points_.empty()) throw DomainError("bounds of an empty point cloud");
    Vec3 lo = points_.front();
    Vec3 hi = points_.front();
    for (const auto& p : points_) {
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::min(lo[a], p[a]);
            hi[a] = std::max(hi[a], p[a]);
        }
    }
    return {lo, hi};
}

PointCloud PointCloud::translated(const Vec3& t) const {
    PointCloud out;
    out.points_.reserve(points_.size());
    for (const auto& p : points_) out.points_.push_back(p + t);
    return out;
}

PointCloud PointCloud::scaled(double s) const {
    PointCloud out;
    out.points_.reserve(points_.size());
    for (const auto& p : points_) out.points_.push_back(p * s);
    return out;
}

}  // namespace voxforge::voxel
