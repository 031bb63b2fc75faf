// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "voxforge/scan/mesh.hpp"

// Procedural closed meshes used for toy datasets and tests. All are centered
// on the origin and sized in meters.
namespace voxforge::scan::shapes {

TriangleMesh box(const Vec3& half_extent);
TriangleMesh cube(double edge);
TriangleMesh uv_sphere(double radius, int slices = 24, int stacks = 12);
// Axis along z.
TriangleMesh cylinder(double radius, double height, int slices = 24);
// Axis along z, tube radius `minor`.
TriangleMesh torus(double major, double minor, int major_segments = 24, int minor_segments = 12);
// Two boxes forming an L in the x-z plane.
TriangleMesh l_bracket(double size, double thickness, double depth);

// The five toy training shapes, scaled to fit a box of edge ~`scale`:
// cube, sphere, cylinder, l_bracket, torus.
struct NamedMesh {
    std::string name;
    TriangleMesh mesh;
};
std::vector<NamedMesh> toy_set(double scale = 0.2);

// Variant of the toy set with per-shape anisotropic scaling and proportions
// drawn from `seed`, used as held-out data.
std::vector<NamedMesh> perturbed_toy_set(unsigned seed, double scale = 0.2);

}  // namespace voxforge::scan::shapes
