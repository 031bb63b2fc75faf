// SPDX-License-Identifier: Apache-2.0

#include "voxforge/voxel/grid_ray.hpp"

#include <cmath>
#include <limits>

namespace voxforge::voxel {

namespace {

// Slab intersection of the ray with the grid box; returns [t_enter, t_exit].
bool clip_to_box(const Frame& f, const Vec3& o, const Vec3& d, double& t0, double& t1) {
    const Vec3 hi = f.max_corner();
    for (int a = 0; a < 3; ++a) {
        if (d[a] == 0.0) {
            if (o[a] < f.origin[a] || o[a] >= hi[a]) return false;
            continue;
        }
        double ta = (f.origin[a] - o[a]) / d[a];
        double tb = (hi[a] - o[a]) / d[a];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
    }
    return t0 <= t1;
}

}  // namespace

std::optional<GridHit> cast_ray(const VoxelGrid& grid, const Vec3& origin, const Vec3& dir, double max_t) {
    const Frame& f = grid.frame();
    double t0 = 0.0;
    double t1 = max_t;
    if (!clip_to_box(f, origin, dir, t0, t1)) return std::nullopt;

    constexpr double kInf = std::numeric_limits<double>::infinity();
    const Vec3 entry = origin + t0 * dir;
    Index3 cell;
    int step[3];
    double t_max[3];
    double t_delta[3];
    int* cell_axis[3] = {&cell.x, &cell.y, &cell.z};
    const int extent[3] = {f.dims.x, f.dims.y, f.dims.z};
    for (int a = 0; a < 3; ++a) {
        const double rel = (entry[a] - f.origin[a]) / f.voxel_size;
        int c = static_cast<int>(std::floor(rel));
        if (c < 0) c = 0;
        if (c >= extent[a]) c = extent[a] - 1;
        *cell_axis[a] = c;
        if (dir[a] > 0.0) {
            step[a] = 1;
            t_delta[a] = f.voxel_size / dir[a];
            t_max[a] = (f.origin[a] + (c + 1) * f.voxel_size - origin[a]) / dir[a];
        } else if (dir[a] < 0.0) {
            step[a] = -1;
            t_delta[a] = -f.voxel_size / dir[a];
            t_max[a] = (f.origin[a] + c * f.voxel_size - origin[a]) / dir[a];
        } else {
            step[a] = 0;
            t_delta[a] = kInf;
            t_max[a] = kInf;
        }
    }

    double t_enter = t0;
    while (t_enter <= t1) {
        if (grid.test(cell)) return GridHit{cell, t_enter, origin + t_enter * dir};
        int axis = 0;
        if (t_max[1] < t_max[axis]) axis = 1;
        if (t_max[2] < t_max[axis]) axis = 2;
        t_enter = t_max[axis];
        *cell_axis[axis] += step[axis];
        if (*cell_axis[axis] < 0 || *cell_axis[axis] >= extent[axis]) break;
        t_max[axis] += t_delta[axis];
    }
    return std::nullopt;
}

bool near_occupied(const VoxelGrid& grid, const Index3& i) {
    for (int dz = -1; dz <= 1; ++dz) {
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if (grid.test_or_empty({i.x + dx, i.y + dy, i.z + dz})) return true;
            }
        }
    }
    return false;
}

}  // namespace voxforge::voxel
