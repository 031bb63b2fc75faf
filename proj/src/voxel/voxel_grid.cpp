// SPDX-License-Identifier: Apache-2.0

#include "voxforge/voxel/voxel_grid.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "voxforge/error.hpp"

namespace voxforge::voxel {

Vec3 Frame::center(const Index3& i) const {
    return {origin.x + (i.x + 0.5) * voxel_size, origin.y + (i.y + 0.5) * voxel_size,
            origin.z + (i.z + 0.5) * voxel_size};
}

std::optional<Index3> Frame::locate(const Vec3& p) const {
    const double fx = std::floor((p.x - origin.x) / voxel_size);
    const double fy = std::floor((p.y - origin.y) / voxel_size);
    const double fz = std::floor((p.z - origin.z) / voxel_size);
    if (!(fx >= 0.0 && fy >= 0.0 && fz >= 0.0 && fx < dims.x && fy < dims.y && fz < dims.z)) {
        return std::nullopt;
    }
    return Index3{static_cast<int>(fx), static_cast<int>(fy), static_cast<int>(fz)};
}

Vec3 Frame::max_corner() const {
    return {origin.x + dims.x * voxel_size, origin.y + dims.y * voxel_size, origin.z + dims.z * voxel_size};
}

VoxelGrid::VoxelGrid(const Frame& frame) : frame_(frame) {
    if (frame.dims.x < 1 || frame.dims.y < 1 || frame.dims.z < 1) {
        throw DomainError("voxel grid dims must be >= 1");
    }
    if (!(frame.voxel_size > 0.0) || !std::isfinite(frame.voxel_size)) {
        throw DomainError("voxel size must be positive and finite");
    }
    if (!is_finite(frame.origin)) throw DomainError("voxel grid origin must be finite");
    words_.assign((frame.dims.count() + kWordBits - 1) / kWordBits, Word{0});
}

VoxelGrid::VoxelGrid(Dims dims, const Vec3& origin, double voxel_size)
    : VoxelGrid(Frame{dims, origin, voxel_size}) {}

Index3 VoxelGrid::unlinear(std::size_t n) const {
    const auto dx = static_cast<std::size_t>(frame_.dims.x);
    const auto dy = static_cast<std::size_t>(frame_.dims.y);
    return {static_cast<int>(n % dx), static_cast<int>((n / dx) % dy), static_cast<int>(n / (dx * dy))};
}

void VoxelGrid::set(std::size_t n, bool value) {
    const Word mask = Word{1} << (n % kWordBits);
    if (value) {
        words_[n / kWordBits] |= mask;
    } else {
        words_[n / kWordBits] &= ~mask;
    }
}

std::size_t VoxelGrid::count() const {
    std::size_t total = 0;
    for (Word w : words_) total += static_cast<std::size_t>(std::popcount(w));
    return total;
}

namespace {

template <typename Op>
VoxelGrid combine(const VoxelGrid& a, const VoxelGrid& b, Op op) {
    require_same_frame(a, b);
    VoxelGrid out(a.frame());
    auto dst = out.words();
    const auto wa = a.words();
    const auto wb = b.words();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = op(wa[i], wb[i]);
    return out;
}

std::string describe(const Frame& f) {
    return "dims " + std::to_string(f.dims.x) + "x" + std::to_string(f.dims.y) + "x" + std::to_string(f.dims.z) +
           ", voxel " + std::to_string(f.voxel_size);
}

}  // namespace

VoxelGrid VoxelGrid::operator&(const VoxelGrid& o) const {
    return combine(*this, o, [](Word x, Word y) { return x & y; });
}
VoxelGrid VoxelGrid::operator|(const VoxelGrid& o) const {
    return combine(*this, o, [](Word x, Word y) { return x | y; });
}
VoxelGrid VoxelGrid::operator^(const VoxelGrid& o) const {
    return combine(*this, o, [](Word x, Word y) { return x ^ y; });
}

void require_same_frame(const VoxelGrid& a, const VoxelGrid& b) {
    if (!a.same_frame(b)) {
        throw ShapeError("voxel grids are not in the same frame (" + describe(a.frame()) + " vs " +
                         describe(b.frame()) + ")");
    }
}

Frame cube_frame(int m, const Vec3& center, double extent) {
    const double s = extent / m;
    return Frame{Dims::cube(m), center - Vec3{extent / 2, extent / 2, extent / 2}, s};
}

}  // namespace voxforge::voxel
