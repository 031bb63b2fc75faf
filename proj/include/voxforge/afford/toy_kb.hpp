// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "voxforge/afford/knowledge_base.hpp"
#include "voxforge/scan/mesh.hpp"
#include "voxforge/util/random.hpp"

namespace voxforge::afford {

// Area-weighted uniform samples on the mesh surface.
voxel::PointCloud sample_surface(const scan::TriangleMesh& mesh, std::size_t n, util::Rng& rng);

// Twelve procedural entries, three per category, with clouds centered on
// the origin. Fully determined by `seed`.
KnowledgeBase toy_knowledge_base(std::uint64_t seed = 0, std::size_t points_per_entry = 400);

}  // namespace voxforge::afford
