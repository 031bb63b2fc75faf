// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

#include "voxforge/voxel/voxel_grid.hpp"

namespace voxforge::voxel {

struct GridHit {
    Index3 voxel;
    double t{0.0};  // ray parameter at which the occupied voxel is entered
    Vec3 point;
};

// First occupied voxel met by origin + t*dir for t in [0, max_t], found by
// 3D DDA traversal. `dir` need not be normalized; t is in units of |dir|.
// If the origin already lies inside an occupied voxel the hit has t = 0.
std::optional<GridHit> cast_ray(const VoxelGrid& grid, const Vec3& origin, const Vec3& dir, double max_t);

// True if voxel i or any of its 26 neighbours is occupied.
bool near_occupied(const VoxelGrid& grid, const Index3& i);

}  // namespace voxforge::voxel
