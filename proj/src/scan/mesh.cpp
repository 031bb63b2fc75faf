// SPDX-License-Identifier: Apache-2.0

#include "voxforge/scan/mesh.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>

#include "voxforge/error.hpp"
#include "voxforge/util/binary_io.hpp"

namespace voxforge::scan {

TriangleMesh::TriangleMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles)
    : vertices_(std::move(vertices)) {
    for (const auto& v : vertices_) {
        if (!is_finite(v)) throw DomainError("mesh has a non-finite vertex");
    }
    triangles_.reserve(triangles.size());
    for (const auto& t : triangles) {
        for (auto idx : t) {
            if (idx >= vertices_.size()) throw DomainError("mesh triangle index out of range");
        }
        const Vec3& a = vertices_[t[0]];
        const Vec3& b = vertices_[t[1]];
        const Vec3& c = vertices_[t[2]];
        if (squared_norm(cross(b - a, c - a)) > 0.0) triangles_.push_back(t);
    }
}

std::pair<Vec3, Vec3> TriangleMesh::bounds() const {
    if (triangles_.empty()) throw DomainError("bounds of an empty mesh");
    Vec3 lo = vertices_[triangles_[0][0]];
    Vec3 hi = lo;
    for (const auto& t : triangles_) {
        for (auto idx : t) {
            for (int a = 0; a < 3; ++a) {
                lo[a] = std::min(lo[a], vertices_[idx][a]);
                hi[a] = std::max(hi[a], vertices_[idx][a]);
            }
        }
    }
    return {lo, hi};
}

TriangleMesh TriangleMesh::transformed(double scale, const Vec3& translation) const {
    return transformed(Vec3{scale, scale, scale}, translation);
}

TriangleMesh TriangleMesh::transformed(const Vec3& scale, const Vec3& translation) const {
    std::vector<Vec3> v;
    v.reserve(vertices_.size());
    for (const auto& p : vertices_) v.push_back(Vec3{p.x * scale.x, p.y * scale.y, p.z * scale.z} + translation);
    return TriangleMesh(std::move(v), triangles_);
}

TriangleMesh TriangleMesh::merge(const TriangleMesh& a, const TriangleMesh& b) {
    std::vector<Vec3> v = a.vertices_;
    v.insert(v.end(), b.vertices_.begin(), b.vertices_.end());
    std::vector<Triangle> t = a.triangles_;
    const auto off = static_cast<std::uint32_t>(a.vertices_.size());
    for (auto tri : b.triangles_) t.push_back({tri[0] + off, tri[1] + off, tri[2] + off});
    return TriangleMesh(std::move(v), std::move(t));
}

namespace {

long parse_obj_index(const std::string& token, std::size_t vertex_count, const std::string& where) {
    const std::string head = token.substr(0, token.find('/'));
    long idx = 0;
    try {
        std::size_t used = 0;
        idx = std::stol(head, &used);
        if (used != head.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw IoError(where + ": bad face index '" + token + "'");
    }
    if (idx < 0) idx += static_cast<long>(vertex_count) + 1;
    if (idx < 1 || idx > static_cast<long>(vertex_count)) throw IoError(where + ": face index out of range");
    return idx - 1;
}

}  // namespace

TriangleMesh load_obj(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<Vec3> verts;
    std::vector<Triangle> tris;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = path.string() + ":" + std::to_string(lineno);
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "v") {
            Vec3 p;
            if (!(ls >> p.x >> p.y >> p.z)) throw IoError(where + ": malformed vertex");
            verts.push_back(p);
        } else if (key == "f") {
            std::vector<std::uint32_t> poly;
            std::string tok;
            while (ls >> tok) poly.push_back(static_cast<std::uint32_t>(parse_obj_index(tok, verts.size(), where)));
            if (poly.size() < 3) throw IoError(where + ": face with fewer than 3 vertices");
            for (std::size_t i = 1; i + 1 < poly.size(); ++i) tris.push_back({poly[0], poly[i], poly[i + 1]});
        }
    }
    try {
        TriangleMesh mesh(std::move(verts), std::move(tris));
        if (mesh.empty()) throw IoError(path.string() + ": mesh has no triangles");
        return mesh;
    } catch (const DomainError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

void save_obj(const std::filesystem::path& path, const TriangleMesh& mesh) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.precision(17);
    for (const auto& v : mesh.vertices()) out << "v " << v.x << ' ' << v.y << ' ' << v.z << '\n';
    for (const auto& t : mesh.triangles()) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

TriangleMesh load_stl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    char header[80];
    if (!in.read(header, 80)) throw IoError(path.string() + ": truncated STL header");
    try {
        const auto count = util::read_le<std::uint32_t>(in, "STL triangle count");
        std::vector<Vec3> verts;
        std::vector<Triangle> tris;
        std::map<std::tuple<float, float, float>, std::uint32_t> weld;
        for (std::uint32_t i = 0; i < count; ++i) {
            for (int k = 0; k < 3; ++k) util::read_le<float>(in, "STL normal");
            Triangle tri{};
            for (int k = 0; k < 3; ++k) {
                const float x = util::read_le<float>(in, "STL vertex");
                const float y = util::read_le<float>(in, "STL vertex");
                const float z = util::read_le<float>(in, "STL vertex");
                auto [it, inserted] = weld.try_emplace({x, y, z}, static_cast<std::uint32_t>(verts.size()));
                if (inserted) verts.push_back({x, y, z});
                tri[static_cast<std::size_t>(k)] = it->second;
            }
            util::read_le<std::uint16_t>(in, "STL attribute");
            tris.push_back(tri);
        }
        TriangleMesh mesh(std::move(verts), std::move(tris));
        if (mesh.empty()) throw IoError("mesh has no triangles");
        return mesh;
    } catch (const Error& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

void save_stl(const std::filesystem::path& path, const TriangleMesh& mesh) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    char header[80] = {};
    std::strncpy(header, "voxforge binary stl", sizeof(header) - 1);
    out.write(header, 80);
    util::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(mesh.triangles().size()));
    for (std::size_t t = 0; t < mesh.triangles().size(); ++t) {
        const auto c = mesh.corners(t);
        const Vec3 n = normalized(cross(c[1] - c[0], c[2] - c[0]));
        for (int a = 0; a < 3; ++a) util::write_le<float>(out, static_cast<float>(n[a]));
        for (const auto& p : c) {
            for (int a = 0; a < 3; ++a) util::write_le<float>(out, static_cast<float>(p[a]));
        }
        util::write_le<std::uint16_t>(out, 0);
    }
    if (!out) throw IoError("failed writing " + path.string());
}

TriangleMesh load_mesh(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".obj") return load_obj(path);
    if (ext == ".stl") return load_stl(path);
    throw IoError(path.string() + ": unsupported mesh extension (expected .obj or .stl)");
}

}  // namespace voxforge::scan
