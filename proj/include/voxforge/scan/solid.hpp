// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "voxforge/scan/mesh.hpp"
#include "voxforge/voxel/voxel_grid.hpp"

namespace voxforge::scan {

// Solid (interior-filled) occupancy of a mesh. A voxel is set when its
// center is inside the mesh by +x ray parity, or when the surface passes
// within voxel_size/2 of its center in the max-norm, i.e. touches the closed
// voxel cube. The band keeps slightly open CAD meshes usable and guarantees
// every surface sample lands in an occupied voxel.
// Throws DomainError if the grid box does not enclose the mesh.
voxel::VoxelGrid mesh_to_solid_grid(const TriangleMesh& mesh, const voxel::Frame& frame);

// Surface band only (no parity fill).
voxel::VoxelGrid mesh_to_shell_grid(const TriangleMesh& mesh, const voxel::Frame& frame);

// Separating-axis triangle / axis-aligned box overlap test.
bool triangle_box_overlap(const Vec3& box_center, const Vec3& half_extent, const Vec3& a, const Vec3& b,
                          const Vec3& c);

}  // namespace voxforge::scan
