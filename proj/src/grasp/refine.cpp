// SPDX-License-Identifier: Apache-2.0

#include "voxforge/grasp/refine.hpp"

#include <cstdio>
#include <exception>
#include <optional>
#include <ostream>

#include "voxforge/error.hpp"
#include "voxforge/util/format.hpp"

namespace voxforge::grasp {

using ad::Tensor;

namespace {

util::Rng stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
    return util::Rng(seq);
}

constexpr std::uint64_t kInitStream = 0xA11CE;
constexpr std::uint64_t kUpdateStream = 0xB0B;
constexpr std::uint64_t kEvalStream = 0xE7A1;

}  // namespace

RefineResult refine_grasp(const GraspEnv& env, const PpoConfig& cfg) {
    cfg.validate();
    auto init = stream(cfg.seed, kInitStream, 0);
    Policy policy = make_policy(cfg, init);
    ValueFunction value = make_value_function(cfg, init);
    std::vector<Tensor> params = policy.parameters();
    for (const auto& p : value.net.parameters()) params.push_back(p);
    ad::Adam opt(params, ad::AdamConfig{cfg.lr});
    auto update_rng = stream(cfg.seed, kUpdateStream, 0);

    RefineResult result;
    result.strategy = env.seed;
    int done = 0;
    int successes = 0;
    for (std::uint64_t batch = 0; done < cfg.episodes; ++batch) {
        const int count = std::min(cfg.episodes_per_batch, cfg.episodes - done);
        std::vector<Trajectory> trajs(static_cast<std::size_t>(count));
        std::exception_ptr failure;
#pragma omp parallel for schedule(static)
        for (int k = 0; k < count; ++k) {
            try {
                GraspEnv local = env;
                auto rng = stream(cfg.seed, batch + 1, static_cast<std::uint64_t>(k));
                const Observation first = env_reset(local, rng);
                trajs[static_cast<std::size_t>(k)] = rollout(local, first, policy, value, cfg, rng, false);
            } catch (...) {
#pragma omp critical
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
        int batch_successes = 0;
        for (const auto& t : trajs) batch_successes += t.success ? 1 : 0;
        successes += batch_successes;
        done += count;
        result.batch_success.push_back(static_cast<double>(batch_successes) / count);
        ppo_update(policy, value, opt, make_batch(trajs, cfg), cfg, update_rng);
    }
    result.episodes = done;
    result.train_success_rate = static_cast<double>(successes) / done;

    // Deterministic evaluation; keep the successful grasp with the most
    // finger contacts, then the smallest offset, then the earliest.
    int eval_successes = 0;
    std::optional<std::pair<std::size_t, double>> best_key;
    for (int k = 0; k < cfg.eval_episodes; ++k) {
        GraspEnv local = env;
        auto rng = stream(cfg.seed, kEvalStream, static_cast<std::uint64_t>(k));
        const Observation first = env_reset(local, rng);
        const Trajectory t = rollout(local, first, policy, value, cfg, rng, true);
        if (!t.success) continue;
        ++eval_successes;
        std::size_t touching = 0;
        for (const auto& c : local.contacts()) touching += c.touching ? 1 : 0;
        const double off = norm(local.offset);
        if (!best_key || touching > best_key->first || (touching == best_key->first && off < best_key->second)) {
            best_key = {touching, off};
            result.strategy = local.current_strategy();
        }
    }
    result.eval_success_rate = cfg.eval_episodes > 0 ? static_cast<double>(eval_successes) / cfg.eval_episodes : 0.0;
    return result;
}

void write_refine_report(std::ostream& out, const std::vector<RefineReportRow>& rows) {
    out << "task,object_id,episodes,train_success_rate,eval_success_rate,chamfer_d_prime\n";
    for (const auto& r : rows)
        out << r.task << ',' << r.object_id << ',' << r.episodes << ',' << util::format_number(r.train_success_rate) << ','
            << util::format_number(r.eval_success_rate) << ',' << util::format_number(r.chamfer_d_prime) << '\n';
}

}  // namespace voxforge::grasp
