// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>

#include "voxforge/voxel/point_cloud.hpp"
#include "voxforge/voxel/voxel_grid.hpp"

namespace voxforge::voxel {

// "VXG1" grid files: magic, 3 x u32 dims, 3 x f64 origin, f64 voxel size,
// then occupancy bits x-fastest, LSB first within each byte, padded to a
// whole byte. All integers and floats little-endian.
void write_vxg(std::ostream& out, const VoxelGrid& grid);
VoxelGrid read_vxg(std::istream& in);
void save_vxg(const std::filesystem::path& path, const VoxelGrid& grid);
VoxelGrid load_vxg(const std::filesystem::path& path);

// ASCII PLY with a single `vertex` element carrying x, y, z. Extra vertex
// properties are skipped on read; other elements are rejected.
void write_ply(std::ostream& out, const PointCloud& cloud);
PointCloud read_ply(std::istream& in);
void save_ply(const std::filesystem::path& path, const PointCloud& cloud);
PointCloud load_ply(const std::filesystem::path& path);

}  // namespace voxforge::voxel
