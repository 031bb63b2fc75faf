// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

#include "voxforge/voxel/point_cloud.hpp"
#include "voxforge/voxel/voxel_grid.hpp"

namespace voxforge::voxel {

struct VoxelizeResult {
    VoxelGrid grid;
    std::size_t dropped{0};  // points outside the grid box
};

// Sets every voxel whose half-open cube [origin + i*s, origin + (i+1)*s)
// holds at least one point. Points on an internal face land in the
// higher-index voxel.
VoxelizeResult voxelize(const PointCloud& cloud, const Frame& frame);

// Centers of all occupied voxels, in linear (x-fastest) order.
PointCloud devoxelize(const VoxelGrid& grid);

// Thresholds a real-valued field laid out in the grid's linear order.
// Values strictly greater than `threshold` are occupied.
VoxelGrid threshold(std::span<const double> values, const Frame& frame, double threshold = 0.5);

// 0/1 doubles in linear order, the inverse of threshold().
std::vector<double> to_dense(const VoxelGrid& grid);

}  // namespace voxforge::voxel
