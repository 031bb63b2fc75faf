// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "voxforge/afford/kdtree.hpp"
#include "voxforge/geometry.hpp"

namespace voxforge::afford {

enum class Category { handle_grasp, wrap_grasp, lift, press };

inline constexpr std::array<Category, 4> kCategories = {Category::handle_grasp, Category::wrap_grasp, Category::lift,
                                                        Category::press};

std::string_view to_string(Category c);
// Throws DomainError for anything but the four snake_case names.
Category parse_category(std::string_view s);

inline constexpr std::size_t kJointCount = 8;

struct GraspStrategy {
    Vec3 grasp_point;      // object frame, meters
    Quat wrist_orientation{1.0, 0.0, 0.0, 0.0};
    std::array<double, kJointCount> joint_angles{};  // radians

    // Throws DomainError unless the quaternion norm is 1 within 1e-9 and
    // every value is finite.
    void validate() const;
    friend bool operator==(const GraspStrategy&, const GraspStrategy&) = default;
};

struct KnowledgeEntry {
    std::string id;
    Category category{Category::handle_grasp};
    voxel::PointCloud cloud;  // object frame, centroid at the origin
    GraspStrategy strategy;
};

// Immutable collection with one prebuilt KdTree per entry.
class KnowledgeBase {
public:
    // Throws DomainError on duplicate or empty ids, empty clouds, or an
    // invalid strategy.
    explicit KnowledgeBase(std::vector<KnowledgeEntry> entries);

    const std::vector<KnowledgeEntry>& entries() const { return entries_; }
    const KdTree& tree(std::size_t i) const { return *trees_.at(i); }
    std::size_t size() const { return entries_.size(); }
    // Indices of the entries in a category, ordered by id.
    std::vector<std::size_t> in_category(Category c) const;

private:
    std::vector<KnowledgeEntry> entries_;
    std::vector<std::shared_ptr<const KdTree>> trees_;
};

struct Retrieval {
    std::size_t index{0};  // into kb.entries()
    double distance{0.0};  // chamfer between the centered query and the entry
};

// Category-scoped argmin of chamfer distance after moving the query's
// centroid to the origin. Ties go to the smaller id. Throws DomainError
// on an empty query or an empty category.
Retrieval retrieve(const voxel::PointCloud& recon, Category category, const KnowledgeBase& kb);

// Maps the entry's grasp point into recon's frame: offset from the entry
// centroid, scaled per axis by the bounding-box ratio recon / entry, then
// placed at recon's centroid. Orientation and joints are copied. Throws
// DomainError when either bounding box has a zero-extent axis.
GraspStrategy transfer_strategy(const KnowledgeEntry& entry, const voxel::PointCloud& recon);

// Manifest: JSON array of {id, category, cloud, grasp: {point, quat,
// joints}}, with cloud a PLY path relative to the manifest's directory.
KnowledgeBase kb_load(const std::filesystem::path& manifest);
// Writes the manifest and one PLY per entry under <dir>/clouds/.
void kb_save(const KnowledgeBase& kb, const std::filesystem::path& manifest);

}  // namespace voxforge::afford
