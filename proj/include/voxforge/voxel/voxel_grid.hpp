// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "voxforge/geometry.hpp"

namespace voxforge::voxel {

struct Index3 {
    int x{0};
    int y{0};
    int z{0};
    friend constexpr bool operator==(const Index3&, const Index3&) = default;
};

struct Dims {
    int x{1};
    int y{1};
    int z{1};

    constexpr std::size_t count() const {
        return static_cast<std::size_t>(x) * static_cast<std::size_t>(y) * static_cast<std::size_t>(z);
    }
    constexpr bool contains(const Index3& i) const {
        return i.x >= 0 && i.y >= 0 && i.z >= 0 && i.x < x && i.y < y && i.z < z;
    }
    static constexpr Dims cube(int m) { return {m, m, m}; }
    friend constexpr bool operator==(const Dims&, const Dims&) = default;
};

// Placement of a grid in world space: dims, min corner and cubic voxel edge.
struct Frame {
    Dims dims;
    Vec3 origin;
    double voxel_size{1.0};

    // Center of voxel i in world coordinates.
    Vec3 center(const Index3& i) const;
    // Voxel containing p under half-open binning; nullopt when p is outside.
    std::optional<Index3> locate(const Vec3& p) const;
    Vec3 max_corner() const;

    friend bool operator==(const Frame&, const Frame&) = default;
};

// Bit-dense binary occupancy grid, x-fastest linear order, packed into
// 64-bit words. Padding bits past dims.count() are always zero.
class VoxelGrid {
public:
    using Word = std::uint64_t;
    static constexpr int kWordBits = 64;

    // Throws DomainError on non-positive dims or voxel_size.
    explicit VoxelGrid(const Frame& frame);
    VoxelGrid(Dims dims, const Vec3& origin, double voxel_size);

    const Frame& frame() const { return frame_; }
    const Dims& dims() const { return frame_.dims; }
    const Vec3& origin() const { return frame_.origin; }
    double voxel_size() const { return frame_.voxel_size; }
    std::size_t size() const { return frame_.dims.count(); }

    std::size_t linear(const Index3& i) const {
        return static_cast<std::size_t>(i.x) +
               static_cast<std::size_t>(frame_.dims.x) *
                   (static_cast<std::size_t>(i.y) + static_cast<std::size_t>(frame_.dims.y) * static_cast<std::size_t>(i.z));
    }
    Index3 unlinear(std::size_t n) const;

    bool test(std::size_t n) const { return (words_[n / kWordBits] >> (n % kWordBits)) & Word{1}; }
    bool test(const Index3& i) const { return test(linear(i)); }
    // Out-of-range indices read as empty.
    bool test_or_empty(const Index3& i) const { return frame_.dims.contains(i) && test(i); }

    void set(std::size_t n, bool value = true);
    void set(const Index3& i, bool value = true) { set(linear(i), value); }

    std::size_t count() const;
    bool empty() const { return count() == 0; }

    std::span<const Word> words() const { return words_; }
    std::span<Word> words() { return words_; }

    VoxelGrid operator&(const VoxelGrid& o) const;
    VoxelGrid operator|(const VoxelGrid& o) const;
    VoxelGrid operator^(const VoxelGrid& o) const;

    // Two grids can be compared voxel-for-voxel only in the same frame.
    bool same_frame(const VoxelGrid& o) const { return frame_ == o.frame_; }

    friend bool operator==(const VoxelGrid&, const VoxelGrid&) = default;

private:
    Frame frame_;
    std::vector<Word> words_;
};

// Throws ShapeError unless a and b share dims, origin and voxel size.
void require_same_frame(const VoxelGrid& a, const VoxelGrid& b);

// Cubic grid of m^3 voxels centered on `center` with total edge `extent`.
Frame cube_frame(int m, const Vec3& center, double extent);

}  // namespace voxforge::voxel
