// SPDX-License-Identifier: Apache-2.0

#include "voxforge/grasp/env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "voxforge/error.hpp"
#include "voxforge/scan/shapes.hpp"
#include "voxforge/scan/solid.hpp"
#include "voxforge/voxel/convert.hpp"
#include "voxforge/voxel/grid_ray.hpp"

namespace voxforge::grasp {

std::array<double, kObservationSize> Observation::to_array() const {
    return {position.x, position.y, position.z, orientation.w, orientation.x, orientation.y, orientation.z, distance,
            forces[0],  forces[1],  forces[2],  forces[3],      forces[4],      forces[5],      forces[6],      forces[7]};
}

GraspEnv::GraspEnv(voxel::PointCloud obj, voxel::VoxelGrid grid, afford::GraspStrategy s, GraspEnvConfig cfg)
    : object(std::move(obj)), solid(std::move(grid)), seed(s), config(cfg), grasp_point(s.grasp_point) {
    if (object.empty()) throw DomainError("grasp environment needs a nonempty object cloud");
    seed.validate();
    if (config.tolerance < 0.0 || config.max_steps < 1 || config.min_contacts > kFingers ||
        !(config.joint_max > config.joint_min) || !(config.finger_length > 0.0))
        throw DomainError("invalid grasp environment config");
    const double n = norm(seed.wrist_orientation);
    seed.wrist_orientation = {seed.wrist_orientation.w / n, seed.wrist_orientation.x / n,
                              seed.wrist_orientation.y / n, seed.wrist_orientation.z / n};
    reset_to({0.0, 0.0, 0.0});
}

Vec3 GraspEnv::approach() const { return rotate(seed.wrist_orientation, {0.0, 0.0, 1.0}); }

std::array<FingerContact, kFingers> GraspEnv::contacts() const {
    const Vec3 a = approach();
    const Vec3 e1 = rotate(seed.wrist_orientation, {1.0, 0.0, 0.0});
    const Vec3 e2 = rotate(seed.wrist_orientation, {0.0, 1.0, 0.0});
    std::array<FingerContact, kFingers> out{};
    for (std::size_t j = 0; j < kFingers; ++j) {
        const double phi = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(kFingers);
        const Vec3 u = std::cos(phi) * e1 + std::sin(phi) * e2;
        const Vec3 base = grasp_point + config.palm_radius * u - config.standoff * a;
        const Vec3 dir = std::cos(joints[j]) * u + std::sin(joints[j]) * a;
        if (const auto hit = voxel::cast_ray(solid, base, dir, config.finger_length)) out[j] = {true, hit->t};
    }
    return out;
}

bool GraspEnv::closure() const {
    std::size_t touching = 0;
    for (const auto& c : contacts()) touching += c.touching ? 1 : 0;
    if (touching < config.min_contacts) return false;
    const auto cell = solid.frame().locate(grasp_point);
    return cell && voxel::near_occupied(solid, *cell);
}

Observation GraspEnv::observe() const {
    Observation o;
    o.position = grasp_point - object.centroid();
    o.orientation = seed.wrist_orientation;
    o.distance = surface_distance;
    const auto c = contacts();
    for (std::size_t j = 0; j < kFingers; ++j)
        o.forces[j] = c[j].touching ? (config.finger_length - c[j].distance) / config.finger_length : 0.0;
    return o;
}

Observation GraspEnv::reset_to(const Vec3& off) {
    offset = off;
    std::copy(seed.joint_angles.begin(), seed.joint_angles.end(), joints.begin());
    for (auto& q : joints) q = std::clamp(q, config.joint_min, config.joint_max);
    steps = 0;
    // Slide the commanded point along the approach axis onto the first
    // occupied voxel, searching from well behind it.
    const Vec3 commanded = seed.grasp_point + offset;
    const Vec3 a = approach();
    const double back = 2.0 * config.tolerance + 2.0 * solid.frame().voxel_size + config.standoff;
    if (const auto hit = voxel::cast_ray(solid, commanded - back * a, a, 2.0 * back)) {
        grasp_point = hit->point;
        on_surface = true;
        surface_distance = hit->t - back;
    } else {
        grasp_point = commanded;
        on_surface = false;
        surface_distance = back;
    }
    return observe();
}

afford::GraspStrategy GraspEnv::current_strategy() const {
    afford::GraspStrategy s = seed;
    s.grasp_point = grasp_point;
    std::copy(joints.begin(), joints.end(), s.joint_angles.begin());
    return s;
}

Observation env_reset(GraspEnv& env, util::Rng& rng) {
    const double t = env.config.tolerance;
    Vec3 off;
    for (int a = 0; a < 3; ++a) off[a] = util::uniform(rng, -t, t);
    return env.reset_to(off);
}

StepResult env_step(GraspEnv& env, std::span<const double, kFingers> action) {
    for (double v : action)
        if (!std::isfinite(v)) throw DomainError("env_step: non-finite action");
    for (std::size_t j = 0; j < kFingers; ++j)
        env.joints[j] = std::clamp(env.joints[j] + action[j], env.config.joint_min, env.config.joint_max);
    ++env.steps;
    StepResult r;
    r.success = env.closure();
    r.done = r.success || env.steps >= env.config.max_steps;
    r.reward = r.success ? 1.0 : 0.0;
    r.observation = env.observe();
    return r;
}

GraspEnv cube_environment(double side, int grid_dim, double joints) {
    if (!(side > 0.0) || grid_dim < 4) throw DomainError("cube_environment: bad size");
    const auto frame = voxel::cube_frame(grid_dim, {0.0, 0.0, 0.0}, side * grid_dim / (grid_dim - 3));
    auto solid = scan::mesh_to_solid_grid(scan::shapes::cube(side), frame);
    auto cloud = voxel::devoxelize(solid);
    afford::GraspStrategy seed;
    seed.grasp_point = {0.0, 0.0, side / 2};
    seed.wrist_orientation = {0.0, 1.0, 0.0, 0.0};
    seed.joint_angles.fill(joints);
    return GraspEnv(std::move(cloud), std::move(solid), seed);
}

}  // namespace voxforge::grasp
