// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "voxforge/grasp/ppo.hpp"

namespace voxforge::grasp {

struct RefineResult {
    afford::GraspStrategy strategy;  // best successful evaluation grasp, or the seed
    double train_success_rate{0.0};  // over all training episodes
    double eval_success_rate{0.0};   // deterministic policy, eval_episodes resets
    int episodes{0};
    std::vector<double> batch_success;  // per training batch, for curves
};

// Trains a fresh policy on `env` for cfg.episodes episodes, collected in
// batches of episodes_per_batch, then evaluates the mean action. Episode
// k of batch b always draws from its own stream, so results do not depend
// on how rollouts are scheduled across threads.
RefineResult refine_grasp(const GraspEnv& env, const PpoConfig& cfg);

struct RefineReportRow {
    std::string task;
    std::string object_id;
    int episodes{0};
    double train_success_rate{0.0};
    double eval_success_rate{0.0};
    double chamfer_d_prime{0.0};
};

void write_refine_report(std::ostream& out, const std::vector<RefineReportRow>& rows);

}  // namespace voxforge::grasp
