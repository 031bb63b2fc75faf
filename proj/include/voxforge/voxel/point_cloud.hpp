// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "voxforge/geometry.hpp"

namespace voxforge::voxel {

// Ordered list of points in meters. All coordinates are finite; emptiness is
// allowed here and rejected by the operations that need at least one point.
class PointCloud {
public:
    PointCloud() = default;
    explicit PointCloud(std::vector<Vec3> points);

    std::span<const Vec3> points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }
    const Vec3& operator[](std::size_t i) const { return points_[i]; }

    void push_back(const Vec3& p);
    void append(const PointCloud& other);

    Vec3 centroid() const;
    // Returns (min corner, max corner). Throws DomainError on an empty cloud.
    std::pair<Vec3, Vec3> bounds() const;

    PointCloud translated(const Vec3& t) const;
    PointCloud scaled(double s) const;

    friend bool operator==(const PointCloud&, const PointCloud&) = default;

private:
    std::vector<Vec3> points_;
};

}  // namespace voxforge::voxel
