// SPDX-License-Identifier: Apache-2.0

#include "voxforge/scan/solid.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "voxforge/error.hpp"

namespace voxforge::scan {

using voxel::Frame;
using voxel::Index3;
using voxel::VoxelGrid;

bool triangle_box_overlap(const Vec3& box_center, const Vec3& half, const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 v0 = a - box_center;
    const Vec3 v1 = b - box_center;
    const Vec3 v2 = c - box_center;
    const Vec3 edges[3] = {v1 - v0, v2 - v1, v0 - v2};

    // Box face normals.
    for (int ax = 0; ax < 3; ++ax) {
        const double lo = std::min({v0[ax], v1[ax], v2[ax]});
        const double hi = std::max({v0[ax], v1[ax], v2[ax]});
        if (lo > half[ax] || hi < -half[ax]) return false;
    }

    // Triangle normal.
    const Vec3 n = cross(edges[0], edges[1]);
    const double r_plane = half.x * std::abs(n.x) + half.y * std::abs(n.y) + half.z * std::abs(n.z);
    if (std::abs(dot(n, v0)) > r_plane) return false;

    // Edge cross products with the box axes.
    const Vec3 axes[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (const auto& e : edges) {
        for (const auto& u : axes) {
            const Vec3 l = cross(u, e);
            const double p0 = dot(l, v0);
            const double p1 = dot(l, v1);
            const double p2 = dot(l, v2);
            const double r = half.x * std::abs(l.x) + half.y * std::abs(l.y) + half.z * std::abs(l.z);
            if (std::min({p0, p1, p2}) > r || std::max({p0, p1, p2}) < -r) return false;
        }
    }
    return true;
}

namespace {

void require_enclosed(const TriangleMesh& mesh, const Frame& frame) {
    if (mesh.empty()) return;
    const auto [lo, hi] = mesh.bounds();
    const Vec3 top = frame.max_corner();
    for (int a = 0; a < 3; ++a) {
        if (lo[a] < frame.origin[a] || hi[a] > top[a]) {
            throw DomainError("mesh_to_solid_grid: grid box does not enclose the mesh");
        }
    }
}

int clamp_index(double v, int n) { return std::clamp(static_cast<int>(std::floor(v)), 0, n - 1); }

void mark_band(const TriangleMesh& mesh, VoxelGrid& grid) {
    const Frame& f = grid.frame();
    const double s = f.voxel_size;
    // Slight inflation so points on a voxel face still count as touching it.
    const double h = 0.5 * s * (1.0 + 1e-9);
    const Vec3 half{h, h, h};
    for (std::size_t t = 0; t < mesh.triangles().size(); ++t) {
        const auto c = mesh.corners(t);
        Index3 lo;
        Index3 hi;
        int* lo_axis[3] = {&lo.x, &lo.y, &lo.z};
        int* hi_axis[3] = {&hi.x, &hi.y, &hi.z};
        const int extent[3] = {f.dims.x, f.dims.y, f.dims.z};
        for (int a = 0; a < 3; ++a) {
            const double mn = std::min({c[0][a], c[1][a], c[2][a]});
            const double mx = std::max({c[0][a], c[1][a], c[2][a]});
            *lo_axis[a] = clamp_index((mn - f.origin[a]) / s - 1e-6, extent[a]);
            *hi_axis[a] = clamp_index((mx - f.origin[a]) / s + 1e-6, extent[a]);
        }
        for (int z = lo.z; z <= hi.z; ++z) {
            for (int y = lo.y; y <= hi.y; ++y) {
                for (int x = lo.x; x <= hi.x; ++x) {
                    const Index3 i{x, y, z};
                    if (grid.test(i)) continue;
                    if (triangle_box_overlap(f.center(i), half, c[0], c[1], c[2])) grid.set(i);
                }
            }
        }
    }
}

// Crossing of the line {y = py, z = pz} with a triangle, as its x coordinate.
std::optional<double> row_crossing(double py, double pz, const std::array<Vec3, 3>& c) {
    const double d = (c[1].y - c[0].y) * (c[2].z - c[0].z) - (c[2].y - c[0].y) * (c[1].z - c[0].z);
    if (d == 0.0) return std::nullopt;
    const double l1 = ((py - c[0].y) * (c[2].z - c[0].z) - (c[2].y - c[0].y) * (pz - c[0].z)) / d;
    const double l2 = ((c[1].y - c[0].y) * (pz - c[0].z) - (py - c[0].y) * (c[1].z - c[0].z)) / d;
    const double l0 = 1.0 - l1 - l2;
    if (l0 < 0.0 || l1 < 0.0 || l2 < 0.0) return std::nullopt;
    return l0 * c[0].x + l1 * c[1].x + l2 * c[2].x;
}

void mark_parity(const TriangleMesh& mesh, VoxelGrid& grid) {
    const Frame& f = grid.frame();
    const double s = f.voxel_size;
    // Rows are nudged off the voxel-center lattice so they never pass exactly
    // through mesh edges or vertices that sit on it.
    const double jitter_y = 1.2345678e-7 * s;
    const double jitter_z = 2.7182818e-7 * s;
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(f.dims.y) * f.dims.z);
    for (std::size_t t = 0; t < mesh.triangles().size(); ++t) {
        const auto c = mesh.corners(t);
        const double ylo = std::min({c[0].y, c[1].y, c[2].y});
        const double yhi = std::max({c[0].y, c[1].y, c[2].y});
        const double zlo = std::min({c[0].z, c[1].z, c[2].z});
        const double zhi = std::max({c[0].z, c[1].z, c[2].z});
        const int y0 = clamp_index((ylo - f.origin.y) / s - 0.5 - 1e-6, f.dims.y);
        const int y1 = clamp_index((yhi - f.origin.y) / s - 0.5 + 1e-6 + 1.0, f.dims.y);
        const int z0 = clamp_index((zlo - f.origin.z) / s - 0.5 - 1e-6, f.dims.z);
        const int z1 = clamp_index((zhi - f.origin.z) / s - 0.5 + 1e-6 + 1.0, f.dims.z);
        for (int z = z0; z <= z1; ++z) {
            for (int y = y0; y <= y1; ++y) {
                const double py = f.origin.y + (y + 0.5) * s + jitter_y;
                const double pz = f.origin.z + (z + 0.5) * s + jitter_z;
                if (auto x = row_crossing(py, pz, c)) rows[static_cast<std::size_t>(z) * f.dims.y + y].push_back(*x);
            }
        }
    }
    for (int z = 0; z < f.dims.z; ++z) {
        for (int y = 0; y < f.dims.y; ++y) {
            auto& xs = rows[static_cast<std::size_t>(z) * f.dims.y + y];
            if (xs.size() < 2) continue;
            std::sort(xs.begin(), xs.end());
            std::size_t left = 0;
            for (int x = 0; x < f.dims.x; ++x) {
                const double cx = f.origin.x + (x + 0.5) * s;
                while (left < xs.size() && xs[left] <= cx) ++left;
                // Odd number of crossings along +x from the center means inside.
                if ((xs.size() - left) % 2 == 1) grid.set(Index3{x, y, z});
            }
        }
    }
}

}  // namespace

VoxelGrid mesh_to_shell_grid(const TriangleMesh& mesh, const Frame& frame) {
    require_enclosed(mesh, frame);
    VoxelGrid grid(frame);
    mark_band(mesh, grid);
    return grid;
}

VoxelGrid mesh_to_solid_grid(const TriangleMesh& mesh, const Frame& frame) {
    require_enclosed(mesh, frame);
    VoxelGrid grid(frame);
    mark_parity(mesh, grid);
    mark_band(mesh, grid);
    return grid;
}

}  // namespace voxforge::scan
