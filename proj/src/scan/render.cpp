// SPDX-License-Identifier: Apache-2.0

#include "voxforge/scan/render.hpp"

#include <fstream>

#include "voxforge/error.hpp"
#include "voxforge/util/binary_io.hpp"

namespace voxforge::scan {

std::size_t DepthImage::hit_count() const {
    std::size_t n = 0;
    for (float d : depth) n += is_hit(d) ? 1 : 0;
    return n;
}

namespace {

DepthImage blank(const Camera& cam) {
    cam.validate();
    DepthImage img;
    img.width = cam.width;
    img.height = cam.height;
    img.depth.assign(static_cast<std::size_t>(cam.width) * cam.height, DepthImage::kNoHit);
    return img;
}

}  // namespace

DepthImage render_depth(const TriangleMesh& mesh, const Camera& cam) {
    const Bvh bvh(mesh);
    return render_depth(bvh, cam);
}

DepthImage render_depth(const Bvh& bvh, const Camera& cam) {
    DepthImage img = blank(cam);
    const int w = cam.width;
    const int h = cam.height;
#pragma omp parallel for schedule(static)
    for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) {
            if (auto hit = bvh.closest_hit(cam.position, cam.ray_direction(u, v))) {
                img.depth[static_cast<std::size_t>(v) * w + u] = static_cast<float>(hit->t);
            }
        }
    }
    return img;
}

DepthImage render_depth_reference(const TriangleMesh& mesh, const Camera& cam) {
    DepthImage img = blank(cam);
    for (int v = 0; v < cam.height; ++v) {
        for (int u = 0; u < cam.width; ++u) {
            const Vec3 dir = cam.ray_direction(u, v);
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t t = 0; t < mesh.triangles().size(); ++t) {
                const auto c = mesh.corners(t);
                if (auto hit = intersect_triangle(cam.position, dir, c[0], c[1], c[2]); hit && *hit < best) best = *hit;
            }
            if (std::isfinite(best)) img.depth[static_cast<std::size_t>(v) * cam.width + u] = static_cast<float>(best);
        }
    }
    return img;
}

voxel::PointCloud backproject(const DepthImage& img, const Camera& cam) {
    if (img.width != cam.width || img.height != cam.height) {
        throw ShapeError("backproject: image size does not match camera");
    }
    std::vector<Vec3> pts;
    pts.reserve(img.hit_count());
    for (int v = 0; v < img.height; ++v) {
        for (int u = 0; u < img.width; ++u) {
            const float d = img.at(u, v);
            if (DepthImage::is_hit(d)) pts.push_back(cam.position + static_cast<double>(d) * cam.ray_direction(u, v));
        }
    }
    return voxel::PointCloud(std::move(pts));
}

void write_dpt(std::ostream& out, const DepthImage& img) {
    out.write("DPT1", 4);
    util::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(img.width));
    util::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(img.height));
    for (float d : img.depth) util::write_le<float>(out, d);
}

DepthImage read_dpt(std::istream& in) {
    util::expect_magic(in, "DPT1");
    DepthImage img;
    img.width = static_cast<int>(util::read_le<std::uint32_t>(in, "DPT1 width"));
    img.height = static_cast<int>(util::read_le<std::uint32_t>(in, "DPT1 height"));
    img.depth.resize(static_cast<std::size_t>(img.width) * img.height);
    for (auto& d : img.depth) d = util::read_le<float>(in, "DPT1 depth");
    return img;
}

void save_dpt(const std::filesystem::path& path, const DepthImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    write_dpt(out, img);
    if (!out) throw IoError("failed writing " + path.string());
}

DepthImage load_dpt(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return read_dpt(in);
    } catch (const Error& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

}  // namespace voxforge::scan
