// SPDX-License-Identifier: Apache-2.0

#include "voxforge/voxel/io.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "voxforge/error.hpp"
#include "voxforge/util/binary_io.hpp"

namespace voxforge::voxel {

using util::read_le;
using util::write_le;

void write_vxg(std::ostream& out, const VoxelGrid& grid) {
    const Frame& f = grid.frame();
    out.write("VXG1", 4);
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(f.dims.x));
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(f.dims.y));
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(f.dims.z));
    write_le<double>(out, f.origin.x);
    write_le<double>(out, f.origin.y);
    write_le<double>(out, f.origin.z);
    write_le<double>(out, f.voxel_size);
    std::vector<char> bytes((grid.size() + 7) / 8, 0);
    for (std::size_t n = 0; n < grid.size(); ++n) {
        if (grid.test(n)) bytes[n / 8] = static_cast<char>(bytes[n / 8] | (1 << (n % 8)));
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

VoxelGrid read_vxg(std::istream& in) {
    util::expect_magic(in, "VXG1");
    Frame f;
    f.dims.x = static_cast<int>(read_le<std::uint32_t>(in, "VXG1 dims"));
    f.dims.y = static_cast<int>(read_le<std::uint32_t>(in, "VXG1 dims"));
    f.dims.z = static_cast<int>(read_le<std::uint32_t>(in, "VXG1 dims"));
    f.origin.x = read_le<double>(in, "VXG1 origin");
    f.origin.y = read_le<double>(in, "VXG1 origin");
    f.origin.z = read_le<double>(in, "VXG1 origin");
    f.voxel_size = read_le<double>(in, "VXG1 voxel size");
    VoxelGrid grid(f);
    std::vector<char> bytes((grid.size() + 7) / 8);
    if (!in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()))) {
        throw IoError("truncated VXG1 occupancy payload");
    }
    for (std::size_t n = 0; n < grid.size(); ++n) {
        if ((static_cast<unsigned char>(bytes[n / 8]) >> (n % 8)) & 1U) grid.set(n);
    }
    return grid;
}

void save_vxg(const std::filesystem::path& path, const VoxelGrid& grid) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    write_vxg(out, grid);
    if (!out) throw IoError("failed writing " + path.string());
}

VoxelGrid load_vxg(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return read_vxg(in);
    } catch (const Error& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

void write_ply(std::ostream& out, const PointCloud& cloud) {
    out << "ply\nformat ascii 1.0\nelement vertex " << cloud.size()
        << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
    out.precision(17);
    for (const auto& p : cloud.points()) out << p.x << ' ' << p.y << ' ' << p.z << '\n';
}

PointCloud read_ply(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("ply", 0) != 0) throw IoError("PLY: missing 'ply' header line");
    std::size_t vertex_count = 0;
    bool in_vertex = false;
    bool seen_vertex = false;
    std::vector<std::string> props;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "format") {
            std::string fmt;
            ls >> fmt;
            if (fmt != "ascii") throw IoError("PLY: only ascii format is supported");
        } else if (key == "element") {
            std::string name;
            std::size_t n = 0;
            ls >> name >> n;
            in_vertex = name == "vertex";
            if (in_vertex) {
                vertex_count = n;
                seen_vertex = true;
            } else if (n != 0) {
                throw IoError("PLY: unsupported element '" + name + "'");
            }
        } else if (key == "property") {
            if (in_vertex) {
                std::string type;
                std::string name;
                ls >> type >> name;
                if (type == "list") throw IoError("PLY: list properties on vertex are not supported");
                props.push_back(name);
            }
        } else if (key == "end_header") {
            break;
        } else if (key == "comment" || key == "obj_info" || key.empty()) {
            continue;
        } else {
            throw IoError("PLY: unexpected header line '" + line + "'");
        }
    }
    if (!seen_vertex) throw IoError("PLY: no vertex element");
    int ix = -1, iy = -1, iz = -1;
    for (int i = 0; i < static_cast<int>(props.size()); ++i) {
        if (props[i] == "x") ix = i;
        if (props[i] == "y") iy = i;
        if (props[i] == "z") iz = i;
    }
    if (ix < 0 || iy < 0 || iz < 0) throw IoError("PLY: vertex element lacks x, y or z");
    std::vector<Vec3> pts;
    pts.reserve(vertex_count);
    std::vector<double> row(props.size());
    for (std::size_t v = 0; v < vertex_count; ++v) {
        for (auto& value : row) {
            if (!(in >> value)) throw IoError("PLY: truncated vertex data at vertex " + std::to_string(v));
        }
        pts.push_back({row[static_cast<std::size_t>(ix)], row[static_cast<std::size_t>(iy)],
                       row[static_cast<std::size_t>(iz)]});
    }
    try {
        return PointCloud(std::move(pts));
    } catch (const DomainError& e) {
        throw IoError(std::string("PLY: ") + e.what());
    }
}

void save_ply(const std::filesystem::path& path, const PointCloud& cloud) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    write_ply(out, cloud);
    if (!out) throw IoError("failed writing " + path.string());
}

PointCloud load_ply(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return read_ply(in);
    } catch (const Error& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

}  // namespace voxforge::voxel
