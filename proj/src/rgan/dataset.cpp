// SPDX-License-Identifier: Apache-2.0

#include "voxforge/rgan/dataset.hpp"

#include <algorithm>
#include <exception>
#include <optional>

#include "voxforge/error.hpp"
#include "voxforge/scan/render.hpp"
#include "voxforge/scan/solid.hpp"
#include "voxforge/voxel/convert.hpp"

namespace voxforge::rgan {

voxel::Frame object_frame(const scan::TriangleMesh& mesh, int grid_dim) {
    if (grid_dim < 4) throw DomainError("object_frame needs grid_dim >= 4");
    const auto [lo, hi] = mesh.bounds();
    const Vec3 size = hi - lo;
    const double edge = std::max({size.x, size.y, size.z});
    if (!(edge > 0.0)) throw DomainError("mesh has zero extent");
    return voxel::cube_frame(grid_dim, 0.5 * (lo + hi), edge * grid_dim / (grid_dim - 3));
}

std::vector<scan::Camera> object_views(const scan::TriangleMesh& mesh, const ScanOptions& opts) {
    const auto [lo, hi] = mesh.bounds();
    return scan::hemisphere_views(static_cast<int>(opts.views), opts.radius, 0.5 * (lo + hi), opts.fov,
                                  opts.image_size);
}

Sample make_sample(const std::string& name, const scan::TriangleMesh& mesh, std::span<const scan::Camera> cams,
                   const voxel::Frame& frame) {
    Sample s{name, {}, scan::mesh_to_solid_grid(mesh, frame)};
    for (const auto& cam : cams) {
        const auto cloud = scan::backproject(scan::render_depth(mesh, cam), cam);
        s.views.views.push_back(voxel::voxelize(cloud, frame).grid);
    }
    return s;
}

Sample make_sample(const scan::shapes::NamedMesh& mesh, const ScanOptions& opts) {
    const auto cams = object_views(mesh.mesh, opts);
    return make_sample(mesh.name, mesh.mesh, cams, object_frame(mesh.mesh, opts.grid_dim));
}

std::vector<Sample> make_dataset(std::span<const scan::shapes::NamedMesh> meshes, const ScanOptions& opts) {
    std::vector<std::optional<Sample>> built(meshes.size());
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < meshes.size(); ++i) {
        try {
            built[i] = make_sample(meshes[i], opts);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    std::vector<Sample> out;
    out.reserve(built.size());
    for (auto& s : built) out.push_back(std::move(*s));
    return out;
}

}  // namespace voxforge::rgan
