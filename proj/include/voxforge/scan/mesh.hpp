// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "voxforge/geometry.hpp"

namespace voxforge::scan {

using Triangle = std::array<std::uint32_t, 3>;

// Indexed triangle soup in meters. The constructor validates indices and
// drops zero-area triangles.
class TriangleMesh {
public:
    TriangleMesh() = default;
    TriangleMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles);

    const std::vector<Vec3>& vertices() const { return vertices_; }
    const std::vector<Triangle>& triangles() const { return triangles_; }
    bool empty() const { return triangles_.empty(); }

    std::array<Vec3, 3> corners(std::size_t t) const {
        const auto& tri = triangles_[t];
        return {vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]};
    }
    std::pair<Vec3, Vec3> bounds() const;

    TriangleMesh transformed(double scale, const Vec3& translation) const;
    // Per-axis scale about the origin, then translation.
    TriangleMesh transformed(const Vec3& scale, const Vec3& translation) const;

    // Concatenates two meshes (no welding).
    static TriangleMesh merge(const TriangleMesh& a, const TriangleMesh& b);

private:
    std::vector<Vec3> vertices_;
    std::vector<Triangle> triangles_;
};

// ASCII OBJ: `v x y z` and `f a b c ...` records (polygons are fanned,
// `a/b/c` index forms and negative indices accepted). Other records ignored.
TriangleMesh load_obj(const std::filesystem::path& path);
void save_obj(const std::filesystem::path& path, const TriangleMesh& mesh);

// Binary STL. Vertices are welded by exact coordinate match.
TriangleMesh load_stl(const std::filesystem::path& path);
void save_stl(const std::filesystem::path& path, const TriangleMesh& mesh);

// Dispatches on extension (.obj / .stl, case-insensitive).
TriangleMesh load_mesh(const std::filesystem::path& path);

}  // namespace voxforge::scan
