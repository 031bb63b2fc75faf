// SPDX-License-Identifier: Apache-2.0

#include "voxforge/voxel/convert.hpp"

#include "voxforge/error.hpp"

namespace voxforge::voxel {

VoxelizeResult voxelize(const PointCloud& cloud, const Frame& frame) {
    VoxelizeResult r{VoxelGrid(frame), 0};
    for (const auto& p : cloud.points()) {
        if (auto i = frame.locate(p)) {
            r.grid.set(*i);
        } else {
            ++r.dropped;
        }
    }
    return r;
}

PointCloud devoxelize(const VoxelGrid& grid) {
    std::vector<Vec3> pts;
    pts.reserve(grid.count());
    for (std::size_t n = 0; n < grid.size(); ++n) {
        if (grid.test(n)) pts.push_back(grid.frame().center(grid.unlinear(n)));
    }
    return PointCloud(std::move(pts));
}

VoxelGrid threshold(std::span<const double> values, const Frame& frame, double threshold) {
    VoxelGrid g(frame);
    if (values.size() != g.size()) throw ShapeError("threshold: value count does not match grid size");
    for (std::size_t n = 0; n < values.size(); ++n) {
        if (values[n] > threshold) g.set(n);
    }
    return g;
}

std::vector<double> to_dense(const VoxelGrid& grid) {
    std::vector<double> out(grid.size(), 0.0);
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = grid.test(n) ? 1.0 : 0.0;
    return out;
}

}  // namespace voxforge::voxel
