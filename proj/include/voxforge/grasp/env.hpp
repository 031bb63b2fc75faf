// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <span>

#include "voxforge/afford/knowledge_base.hpp"
#include "voxforge/util/random.hpp"
#include "voxforge/voxel/voxel_grid.hpp"

// Analytic grasp-stability environment. The hand approaches along
// R(q) * z. Eight fingers sit on a ring around the approach axis, set back
// from the grasp point, and swing from pointing outward (joint 0) to
// pointing along the approach (joint pi/2). A finger touches the object
// when its ray meets an occupied voxel within the finger length.
namespace voxforge::grasp {

inline constexpr std::size_t kFingers = afford::kJointCount;
inline constexpr std::size_t kObservationSize = 16;
using Joints = std::array<double, kFingers>;

struct GraspEnvConfig {
    double tolerance{0.03};     // half-width of the grasp point region, m
    int max_steps{20};
    std::size_t min_contacts{6};
    double palm_radius{0.02};   // finger base ring radius, m
    double standoff{0.015};     // finger bases sit this far back along the approach, m
    double finger_length{0.03};
    double joint_min{0.0};
    double joint_max{1.5707963267948966};
};

// pose (3 position + 4 quaternion), distance to surface, 8 contact forces.
struct Observation {
    Vec3 position;   // grasp point relative to the object centroid
    Quat orientation;
    double distance{0.0};
    std::array<double, kFingers> forces{};

    std::array<double, kObservationSize> to_array() const;
};

struct FingerContact {
    bool touching{false};
    double distance{0.0};  // along the finger ray, when touching
};

struct StepResult {
    Observation observation;
    double reward{0.0};
    bool done{false};
    bool success{false};
};

struct GraspEnv {
    voxel::PointCloud object;
    voxel::VoxelGrid solid;
    afford::GraspStrategy seed;
    GraspEnvConfig config;

    // Episode state.
    Vec3 offset;           // commanded grasp point = seed point + offset
    Joints joints{};
    int steps{0};
    Vec3 grasp_point;      // commanded point moved onto the surface along the approach
    bool on_surface{false};
    double surface_distance{0.0};

    // Throws DomainError on an empty object or invalid seed strategy.
    GraspEnv(voxel::PointCloud object, voxel::VoxelGrid solid, afford::GraspStrategy seed, GraspEnvConfig cfg = {});

    Vec3 approach() const;
    std::array<FingerContact, kFingers> contacts() const;
    // At least min_contacts fingers touch and the grasp voxel lies within
    // one voxel of an occupied one.
    bool closure() const;
    Observation observe() const;
    // Places the episode at a fixed offset with the seed's joints.
    Observation reset_to(const Vec3& offset);
    afford::GraspStrategy current_strategy() const;
};

// Samples the offset uniformly in the tolerance cube.
Observation env_reset(GraspEnv& env, util::Rng& rng);
// Adds the action to the joints, clamps to the joint limits and advances
// one step. The episode ends with reward 1 on closure, or with reward 0
// after max_steps. Throws DomainError on a non-finite action.
StepResult env_step(GraspEnv& env, std::span<const double, kFingers> action);

// Solid cube of edge `side` centered at the origin, voxelized at m^3, with
// a top-down seed at the center of the top face and joints at `joints`.
GraspEnv cube_environment(double side = 0.2, int grid_dim = 32, double joints = 0.4);

}  // namespace voxforge::grasp
