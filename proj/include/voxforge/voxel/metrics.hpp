// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

#include "voxforge/voxel/voxel_grid.hpp"

namespace voxforge::voxel {

// Voxel tallies between a reconstruction and its ground truth.
// false_negative: truth voxels the reconstruction missed.
// false_positive: reconstruction voxels absent from the truth.
struct OverlapCounts {
    std::size_t intersection{0};
    std::size_t union_{0};
    std::size_t false_negative{0};
    std::size_t false_positive{0};

    friend bool operator==(const OverlapCounts&, const OverlapCounts&) = default;
};

struct MetricReport {
    double iou{0.0};
    double hit_rate{0.0};
    double accuracy{0.0};
    OverlapCounts counts;
};

// Word-wise popcount tallies. Throws ShapeError on a frame mismatch.
OverlapCounts overlap_counts(const VoxelGrid& recon, const VoxelGrid& truth);

// All three metrics share the union as denominator. Throws ShapeError on a
// frame mismatch and DomainError when both grids are empty.
MetricReport evaluate(const VoxelGrid& recon, const VoxelGrid& truth);

double iou(const VoxelGrid& recon, const VoxelGrid& truth);
// 1 - FN/union: how complete the reconstruction is.
double hit_rate(const VoxelGrid& recon, const VoxelGrid& truth);
// 1 - FP/union: how much of the reconstruction is correct.
double accuracy(const VoxelGrid& recon, const VoxelGrid& truth);

}  // namespace voxforge::voxel
