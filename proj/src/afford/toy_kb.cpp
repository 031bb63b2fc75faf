// SPDX-License-Identifier: Apache-2.0

#include "voxforge/afford/toy_kb.hpp"

#include <cmath>
#include <numbers>

#include "voxforge/error.hpp"
#include "voxforge/scan/shapes.hpp"

namespace voxforge::afford {

voxel::PointCloud sample_surface(const scan::TriangleMesh& mesh, std::size_t n, util::Rng& rng) {
    const std::size_t t = mesh.triangles().size();
    if (t == 0) throw DomainError("sample_surface: mesh has no triangles");
    std::vector<double> cumulative(t);
    double total = 0.0;
    for (std::size_t i = 0; i < t; ++i) {
        const auto c = mesh.corners(i);
        total += 0.5 * norm(cross(c[1] - c[0], c[2] - c[0]));
        cumulative[i] = total;
    }
    voxel::PointCloud out;
    for (std::size_t k = 0; k < n; ++k) {
        const double r = util::unit_uniform(rng) * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
        if (it == cumulative.end()) --it;
        const auto c = mesh.corners(static_cast<std::size_t>(it - cumulative.begin()));
        double u = util::unit_uniform(rng);
        double v = util::unit_uniform(rng);
        if (u + v > 1.0) {
            u = 1.0 - u;
            v = 1.0 - v;
        }
        out.push_back(c[0] + u * (c[1] - c[0]) + v * (c[2] - c[0]));
    }
    return out;
}

namespace {

const Quat kTopDown{0.0, 1.0, 0.0, 0.0};
const Quat kFromSide{std::numbers::sqrt2 / 2, 0.0, std::numbers::sqrt2 / 2, 0.0};

struct Recipe {
    Category category;
    scan::TriangleMesh mesh;
    Quat orientation;
    double joints;
    // Grasp point as a fraction of the centered bounding box, in [-1, 1].
    Vec3 grasp_fraction;
};

}  // namespace

KnowledgeBase toy_knowledge_base(std::uint64_t seed, std::size_t points_per_entry) {
    namespace sh = scan::shapes;
    util::Rng rng(seed);
    auto jitter = [&] { return util::uniform(rng, 0.9, 1.1); };

    std::vector<Recipe> recipes;
    for (int k = 0; k < 3; ++k) {
        const double s = 0.16 + 0.02 * k;
        recipes.push_back({Category::handle_grasp, sh::l_bracket(s * jitter(), 0.05 * jitter(), 0.1 * jitter()),
                           kFromSide, 0.8, {-1.0, 0.0, 0.6}});
    }
    for (int k = 0; k < 3; ++k)
        recipes.push_back({Category::wrap_grasp, sh::cylinder((0.04 + 0.01 * k) * jitter(), 0.18 * jitter()),
                           kFromSide, 0.6, {-1.0, 0.0, 0.0}});
    for (int k = 0; k < 3; ++k)
        recipes.push_back({Category::lift, sh::box(Vec3{0.1 - 0.01 * k, 0.07 + 0.01 * k, 0.05} * jitter()),
                           kTopDown, 0.5, {0.0, 0.0, 1.0}});
    for (int k = 0; k < 3; ++k) {
        auto mesh = k == 2 ? sh::uv_sphere(0.06 * jitter()) : sh::box(Vec3{0.06, 0.06, 0.02 + 0.01 * k} * jitter());
        recipes.push_back({Category::press, std::move(mesh), kTopDown, 0.5, {0.0, 0.0, 1.0}});
    }

    std::vector<KnowledgeEntry> entries;
    int counter[4] = {0, 0, 0, 0};
    for (auto& r : recipes) {
        KnowledgeEntry e;
        const int slot = counter[static_cast<int>(r.category)]++;
        e.id = std::string(to_string(r.category)) + "_" + std::to_string(slot);
        e.category = r.category;
        const auto raw = sample_surface(r.mesh, points_per_entry, rng);
        e.cloud = raw.translated(-raw.centroid());
        const auto [lo, hi] = e.cloud.bounds();
        for (int a = 0; a < 3; ++a) e.strategy.grasp_point[a] = 0.5 * (lo[a] + hi[a]) + 0.5 * (hi[a] - lo[a]) * r.grasp_fraction[a];
        e.strategy.wrist_orientation = r.orientation;
        for (std::size_t j = 0; j < kJointCount; ++j) e.strategy.joint_angles[j] = r.joints + 0.05 * static_cast<double>(j % 2);
        entries.push_back(std::move(e));
    }
    return KnowledgeBase(std::move(entries));
}

}  // namespace voxforge::afford
