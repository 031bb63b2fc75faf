// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "voxforge/rgan/train.hpp"
#include "voxforge/scan/camera.hpp"
#include "voxforge/scan/shapes.hpp"

namespace voxforge::rgan {

struct ScanOptions {
    int grid_dim{32};
    std::size_t views{3};
    int image_size{scan::kDefaultImageSize};
    double radius{scan::kDefaultRadius};
    double fov{0.25};
};

// Cube grid centered on the mesh bounds with 1.5 voxels of margin per side,
// so axis-aligned faces never sit on voxel boundaries.
voxel::Frame object_frame(const scan::TriangleMesh& mesh, int grid_dim);
// Viewpoints on the upper hemisphere around the mesh's bounding-box center.
std::vector<scan::Camera> object_views(const scan::TriangleMesh& mesh, const ScanOptions& opts);

// Renders each camera, back-projects, and voxelizes in `frame`; the truth
// is the solid fill of the mesh in the same frame.
Sample make_sample(const std::string& name, const scan::TriangleMesh& mesh, std::span<const scan::Camera> cams,
                   const voxel::Frame& frame);
Sample make_sample(const scan::shapes::NamedMesh& mesh, const ScanOptions& opts);
// Samples are built in parallel and returned in input order.
std::vector<Sample> make_dataset(std::span<const scan::shapes::NamedMesh> meshes, const ScanOptions& opts);

}  // namespace voxforge::rgan
