// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "voxforge/autodiff/optim.hpp"
#include "voxforge/grasp/env.hpp"

namespace voxforge::grasp {

struct PpoConfig {
    double clip{0.2};
    double gamma{0.99};
    double gae_lambda{0.95};
    int update_epochs{4};
    std::size_t minibatch{64};
    std::size_t hidden{64};
    double lr{1e-3};
    std::uint64_t seed{0};
    int episodes{1000};
    int episodes_per_batch{20};
    double entropy_coef{1e-3};
    double value_coef{0.5};
    double init_log_std{-0.5};
    double action_scale{0.1};  // joint deltas are action_scale * tanh(u)
    int eval_episodes{100};

    // Throws DomainError unless clip is in (0, 1), gamma and gae_lambda in
    // (0, 1], and all counts are positive.
    void validate() const;
};

struct DenseLayer {
    ad::Tensor weight;  // [out, in]
    ad::Tensor bias;    // [out]
};

// Two tanh hidden layers and a linear head.
struct Mlp {
    std::vector<DenseLayer> layers;

    ad::Tensor forward(const ad::Tensor& x) const;  // x [n, in]
    // Single-row evaluation without recording a graph.
    std::vector<double> evaluate(std::span<const double> x) const;
    std::vector<ad::Tensor> parameters() const;
};

// Gaussian over the pre-squash action u with a state-independent log std.
struct Policy {
    Mlp mean;
    ad::Tensor log_std;  // [kFingers]

    std::vector<ad::Tensor> parameters() const;
};

struct ValueFunction {
    Mlp net;
};

Policy make_policy(const PpoConfig& cfg, util::Rng& rng);
ValueFunction make_value_function(const PpoConfig& cfg, util::Rng& rng);

struct Step {
    std::array<double, kObservationSize> observation{};
    std::array<double, kFingers> u{};  // pre-squash sample
    double log_prob{0.0};
    double reward{0.0};
    double value{0.0};
};

struct Trajectory {
    std::vector<Step> steps;
    bool terminal{true};
    double bootstrap_value{0.0};  // V(s_T) when the episode was cut short
    bool success{false};
};

double log_prob(const Policy& policy, std::span<const double> observation, std::span<const double> u);

// Runs one episode from the environment's current reset state. Stochastic
// episodes sample u ~ N(mean, std); deterministic ones use u = mean.
Trajectory rollout(GraspEnv& env, const Observation& first, const Policy& policy, const ValueFunction& value,
                   const PpoConfig& cfg, util::Rng& rng, bool deterministic);

// Generalized advantage estimates, before normalization. Throws
// DomainError on an empty trajectory.
std::vector<double> gae_advantages(const Trajectory& traj, double gamma, double lambda);
// Shifts and scales to zero mean and unit variance; leaves constant input centered.
void normalize_advantages(std::span<double> adv);

// Per-sample min(r * A, clip(r, 1 - eps, 1 + eps) * A).
ad::Tensor clipped_surrogate(const ad::Tensor& ratio, const ad::Tensor& advantage, double eps);

struct PpoLosses {
    double policy{0.0};
    double value{0.0};
    double entropy{0.0};
};

struct PpoBatch {
    std::vector<Step> steps;
    std::vector<double> advantages;  // normalized
    std::vector<double> returns;     // raw advantage + recorded value
};
PpoBatch make_batch(const std::vector<Trajectory>& trajs, const PpoConfig& cfg);

// Policy loss -mean(clipped surrogate) on a subset of the batch.
ad::Tensor surrogate_loss(const Policy& policy, const PpoBatch& batch, std::span<const std::size_t> rows, double eps);

// update_epochs passes of shuffled minibatches over the batch, one Adam
// step per minibatch on policy + value_coef * value - entropy_coef *
// entropy. Returns the losses of the last minibatch. Throws DomainError on
// an empty batch or a non-finite loss.
PpoLosses ppo_update(Policy& policy, ValueFunction& value, ad::Adam& opt, const PpoBatch& batch,
                     const PpoConfig& cfg, util::Rng& rng);

}  // namespace voxforge::grasp
