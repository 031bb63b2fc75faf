// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "voxforge/afford/kdtree.hpp"

// Chamfer distance: the sum over a of the squared distance to the nearest
// point of b, plus the same sum from b to a. Sums, not means.
namespace voxforge::afford {

// Both throw DomainError on an empty cloud.
double chamfer(const voxel::PointCloud& a, const voxel::PointCloud& b);
// Reuses prebuilt trees; tree_a must index a and tree_b must index b.
double chamfer(const voxel::PointCloud& a, const KdTree& tree_a, const voxel::PointCloud& b, const KdTree& tree_b);
// chamfer divided by (|a| + |b|), for comparing clouds of different sizes.
double chamfer_normalized(const voxel::PointCloud& a, const voxel::PointCloud& b);

namespace reference {
// Double loop over all pairs, single-threaded.
double chamfer(const voxel::PointCloud& a, const voxel::PointCloud& b);
}  // namespace reference

}  // namespace voxforge::afford
