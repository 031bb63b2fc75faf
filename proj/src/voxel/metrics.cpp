// SPDX-License-Identifier: Apache-2.0

#include "voxforge/voxel/metrics.hpp"

#include <bit>

#include "voxforge/error.hpp"

namespace voxforge::voxel {

OverlapCounts overlap_counts(const VoxelGrid& recon, const VoxelGrid& truth) {
    require_same_frame(recon, truth);
    const auto r = recon.words();
    const auto t = truth.words();
    OverlapCounts c;
    for (std::size_t i = 0; i < r.size(); ++i) {
        c.intersection += static_cast<std::size_t>(std::popcount(r[i] & t[i]));
        c.union_ += static_cast<std::size_t>(std::popcount(r[i] | t[i]));
        c.false_negative += static_cast<std::size_t>(std::popcount(t[i] & ~r[i]));
        c.false_positive += static_cast<std::size_t>(std::popcount(r[i] & ~t[i]));
    }
    return c;
}

MetricReport evaluate(const VoxelGrid& recon, const VoxelGrid& truth) {
    const OverlapCounts c = overlap_counts(recon, truth);
    if (c.union_ == 0) throw DomainError("metrics undefined: both grids are empty");
    const auto u = static_cast<double>(c.union_);
    MetricReport m;
    m.counts = c;
    m.iou = static_cast<double>(c.intersection) / u;
    m.hit_rate = 1.0 - static_cast<double>(c.false_negative) / u;
    m.accuracy = 1.0 - static_cast<double>(c.false_positive) / u;
    return m;
}

double iou(const VoxelGrid& recon, const VoxelGrid& truth) { return evaluate(recon, truth).iou; }
double hit_rate(const VoxelGrid& recon, const VoxelGrid& truth) { return evaluate(recon, truth).hit_rate; }
double accuracy(const VoxelGrid& recon, const VoxelGrid& truth) { return evaluate(recon, truth).accuracy; }

}  // namespace voxforge::voxel
