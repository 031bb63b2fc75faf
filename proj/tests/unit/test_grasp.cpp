// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "voxforge/autodiff/ops.hpp"
#include "voxforge/error.hpp"
#include "voxforge/grasp/refine.hpp"
#include "voxforge/scan/shapes.hpp"
#include "voxforge/scan/solid.hpp"
#include "voxforge/voxel/convert.hpp"

using namespace voxforge;
using namespace voxforge::grasp;
using ad::Tensor;

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;
const Quat kTopDown{0.0, 1.0, 0.0, 0.0};

double inf_norm(const Vec3& v) { return std::max({std::abs(v.x), std::abs(v.y), std::abs(v.z)}); }

// Marches a finger ray in small fixed steps and reports whether any sample
// lands in an occupied voxel.
bool march_hits(const voxel::VoxelGrid& g, const Vec3& base, const Vec3& dir, double length) {
    const int n = 3000;
    for (int i = 0; i <= n; ++i) {
        const auto cell = g.frame().locate(base + (length * i / n) * dir);
        if (cell && g.test(*cell)) return true;
    }
    return false;
}

std::size_t oracle_contacts(const GraspEnv& env) {
    const Vec3 a = rotate(env.seed.wrist_orientation, {0, 0, 1});
    const Vec3 e1 = rotate(env.seed.wrist_orientation, {1, 0, 0});
    const Vec3 e2 = rotate(env.seed.wrist_orientation, {0, 1, 0});
    std::size_t count = 0;
    for (std::size_t j = 0; j < kFingers; ++j) {
        const double phi = 2.0 * std::numbers::pi * j / kFingers;
        const Vec3 u = std::cos(phi) * e1 + std::sin(phi) * e2;
        const Vec3 base = env.grasp_point + env.config.palm_radius * u - env.config.standoff * a;
        const Vec3 dir = std::cos(env.joints[j]) * u + std::sin(env.joints[j]) * a;
        count += march_hits(env.solid, base, dir, env.config.finger_length) ? 1 : 0;
    }
    return count;
}

GraspEnv rod_environment(double offset) {
    const auto frame = voxel::cube_frame(64, {0.0, 0.0, 0.0}, 0.24);
    auto solid = scan::mesh_to_solid_grid(scan::shapes::cylinder(0.005, 0.2), frame);
    afford::GraspStrategy seed;
    seed.grasp_point = {offset, 0.0, 0.05};
    seed.wrist_orientation = kTopDown;
    seed.joint_angles.fill(kHalfPi);
    GraspEnvConfig cfg;
    cfg.tolerance = 0.0;
    auto cloud = voxel::devoxelize(solid);
    return GraspEnv(std::move(cloud), std::move(solid), seed, cfg);
}

Trajectory make_traj(const std::vector<double>& rewards, const std::vector<double>& values, bool terminal,
                     double bootstrap) {
    Trajectory t;
    for (std::size_t i = 0; i < rewards.size(); ++i) {
        Step s;
        s.reward = rewards[i];
        s.value = values[i];
        t.steps.push_back(s);
    }
    t.terminal = terminal;
    t.bootstrap_value = bootstrap;
    return t;
}

PpoConfig small_ppo(int episodes) {
    PpoConfig cfg;
    cfg.episodes = episodes;
    cfg.eval_episodes = 10;
    cfg.seed = 11;
    return cfg;
}

}  // namespace

TEST_CASE("reset sampling") {
    auto env = cube_environment();
    util::Rng rng(4);
    Vec3 sum;
    const int n = 1000;
    for (int i = 0; i < n; ++i) {
        env_reset(env, rng);
        CHECK(inf_norm(env.offset) <= env.config.tolerance);
        CHECK(env.steps == 0);
        sum = sum + env.offset;
    }
    for (int a = 0; a < 3; ++a) CHECK(std::abs(sum[a] / n) < 0.005);

    util::Rng r1(9), r2(9);
    auto e1 = cube_environment();
    auto e2 = cube_environment();
    CHECK(env_reset(e1, r1).to_array() == env_reset(e2, r2).to_array());
}

TEST_CASE("steps, limits and rewards") {
    SUBCASE("zero action keeps the pose") {
        auto env = cube_environment();
        const auto before = env.reset_to({0.01, -0.02, 0.0});
        const std::array<double, kFingers> zero{};
        const auto r = env_step(env, zero);
        CHECK(env.steps == 1);
        CHECK(r.observation.position == before.position);
        CHECK(r.observation.orientation == before.orientation);
        CHECK(r.observation.distance == before.distance);
    }
    SUBCASE("closed hand centered on a cube closes") {
        auto env = cube_environment(0.2, 32, kHalfPi);
        env.reset_to({});
        // Fingers point down from 15 mm above the top face, well inside their 30 mm reach.
        CHECK(env.on_surface);
        CHECK(std::abs(env.grasp_point.z - 0.1) <= env.solid.voxel_size());
        CHECK(oracle_contacts(env) == kFingers);
        const std::array<double, kFingers> zero{};
        const auto r = env_step(env, zero);
        CHECK(r.reward == 1.0);
        CHECK(r.done);
        CHECK(r.success);
        for (double f : r.observation.forces) CHECK(f == doctest::Approx(0.5).epsilon(0.3));
    }
    SUBCASE("missing a rod gives no reward") {
        auto env = rod_environment(0.03);
        env.reset_to({});
        CHECK_FALSE(env.on_surface);
        CHECK(oracle_contacts(env) < env.config.min_contacts);
        const std::array<double, kFingers> zero{};
        StepResult r;
        while (!r.done) {
            r = env_step(env, zero);
            CHECK(r.reward == 0.0);
        }
        CHECK(env.steps == env.config.max_steps);
        CHECK_FALSE(r.success);
    }
    SUBCASE("joints stay clamped") {
        auto env = cube_environment();
        util::Rng rng(2);
        env_reset(env, rng);
        for (int i = 0; i < 15; ++i) {
            std::array<double, kFingers> act{};
            for (auto& a : act) a = util::uniform(rng, -2.0, 2.0);
            const auto r = env_step(env, act);
            for (double q : env.joints) {
                CHECK(q >= env.config.joint_min);
                CHECK(q <= env.config.joint_max);
            }
            CHECK((r.reward == 0.0 || r.reward == 1.0));
            if (r.done) env_reset(env, rng);
        }
        std::array<double, kFingers> bad{};
        bad[3] = std::nan("");
        CHECK_THROWS_AS(env_step(env, bad), DomainError);
    }
    SUBCASE("contact counts agree with a marching oracle") {
        auto env = cube_environment(0.2, 32, 0.4);
        util::Rng rng(8);
        for (int i = 0; i < 20; ++i) {
            env_reset(env, rng);
            for (auto& q : env.joints) q = util::uniform(rng, 0.0, kHalfPi);
            std::size_t count = 0;
            for (const auto& c : env.contacts()) count += c.touching ? 1 : 0;
            CHECK(count == oracle_contacts(env));
        }
    }
}

TEST_CASE("environment validation") {
    auto env = cube_environment();
    CHECK_THROWS_AS(GraspEnv({}, env.solid, env.seed), DomainError);
    auto bad = env.seed;
    bad.wrist_orientation = {0.5, 0.0, 0.0, 0.0};
    CHECK_THROWS_AS(GraspEnv(env.object, env.solid, bad), DomainError);
    GraspEnvConfig cfg;
    cfg.min_contacts = 9;
    CHECK_THROWS_AS(GraspEnv(env.object, env.solid, env.seed, cfg), DomainError);
}

TEST_CASE("generalized advantage estimation") {
    const double g = 0.9, l = 0.8;
    CHECK_THROWS_AS(gae_advantages(Trajectory{}, g, l), DomainError);
    for (double a : gae_advantages(make_traj({0, 0, 0}, {0, 0, 0}, true, 0.0), g, l)) CHECK(a == 0.0);
    CHECK(gae_advantages(make_traj({1}, {0}, true, 0.0), g, l) == std::vector<double>{1.0});

    util::Rng rng(3);
    for (bool terminal : {true, false}) {
        std::vector<double> r(5), v(5);
        for (auto& x : r) x = util::uniform(rng, -1, 1);
        for (auto& x : v) x = util::uniform(rng, -1, 1);
        const double boot = 0.37;
        const auto got = gae_advantages(make_traj(r, v, terminal, boot), g, l);
        std::vector<double> next(v.begin() + 1, v.end());
        next.push_back(terminal ? 0.0 : boot);
        for (std::size_t t = 0; t < 5; ++t) {
            double want = 0.0;
            for (std::size_t k = 0; t + k < 5; ++k)
                want += std::pow(g * l, static_cast<double>(k)) * (r[t + k] + g * next[t + k] - v[t + k]);
            CHECK(got[t] == doctest::Approx(want).epsilon(1e-12));
        }
    }

    std::vector<double> adv{1, 2, 3, 4};
    normalize_advantages(adv);
    double m = 0, s = 0;
    for (double a : adv) m += a / 4;
    for (double a : adv) s += (a - m) * (a - m) / 4;
    CHECK(std::abs(m) < 1e-12);
    CHECK(s == doctest::Approx(1.0));
    std::vector<double> flat{2, 2};
    normalize_advantages(flat);
    CHECK(flat == std::vector<double>{0, 0});
}

TEST_CASE("clipped surrogate") {
    const double eps = 0.2;
    SUBCASE("identity at ratio one") {
        const Tensor adv = Tensor::from({4}, {1.5, -0.3, 0.0, 2.0});
        const Tensor s = clipped_surrogate(Tensor::full({4}, 1.0), adv, eps);
        CHECK(std::vector<double>(s.data().begin(), s.data().end()) == std::vector<double>{1.5, -0.3, 0.0, 2.0});
    }
    SUBCASE("saturated samples carry no gradient") {
        const Tensor r = Tensor::from({2}, {1.0 + 2 * eps, 1.0 - 2 * eps}, true);
        const Tensor adv = Tensor::from({2}, {1.0, -1.0});
        ad::backward(ad::sum(clipped_surrogate(r, adv, eps)));
        CHECK(r.grad()[0] == 0.0);
        CHECK(r.grad()[1] == 0.0);
    }
    SUBCASE("gain per sample is capped") {
        util::Rng rng(6);
        std::vector<double> rv(500), av(500);
        for (auto& x : rv) x = util::uniform(rng, 0.0, 3.0);
        for (auto& x : av) x = util::uniform(rng, -2.0, 2.0);
        const Tensor s = clipped_surrogate(Tensor::from({500}, rv), Tensor::from({500}, av), eps);
        for (std::size_t i = 0; i < 500; ++i) CHECK(s.data()[i] <= (1 + eps) * std::abs(av[i]) + 1e-15);
    }
}

TEST_CASE("one update lowers the surrogate loss") {
    PpoConfig cfg = small_ppo(20);
    cfg.update_epochs = 1;
    cfg.minibatch = 4096;
    cfg.entropy_coef = 0.0;
    util::Rng rng(cfg.seed);
    auto policy = make_policy(cfg, rng);
    auto value = make_value_function(cfg, rng);
    auto env = cube_environment();
    std::vector<Trajectory> trajs;
    for (int i = 0; i < 10; ++i) {
        const auto first = env_reset(env, rng);
        trajs.push_back(rollout(env, first, policy, value, cfg, rng, false));
        for (const auto& s : trajs.back().steps) CHECK((s.reward == 0.0 || s.reward == 1.0));
    }
    const auto batch = make_batch(trajs, cfg);
    std::vector<std::size_t> rows(batch.steps.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    const double before = surrogate_loss(policy, batch, rows, cfg.clip).item();
    // Fresh policy: every ratio is one, so the loss is minus the mean advantage.
    CHECK(std::abs(before) < 1e-12);
    auto params = policy.parameters();
    for (const auto& p : value.net.parameters()) params.push_back(p);
    ad::Adam opt(params, ad::AdamConfig{cfg.lr});
    ppo_update(policy, value, opt, batch, cfg, rng);
    CHECK(surrogate_loss(policy, batch, rows, cfg.clip).item() < before);
    CHECK_THROWS_AS(ppo_update(policy, value, opt, PpoBatch{}, cfg, rng), DomainError);
}

TEST_CASE("refinement") {
    SUBCASE("an already closing seed with no slack always succeeds") {
        auto env = cube_environment(0.2, 32, kHalfPi);
        env.config.tolerance = 0.0;
        const auto r = refine_grasp(env, small_ppo(40));
        CHECK(r.episodes == 40);
        CHECK(r.train_success_rate == 1.0);
        CHECK(r.eval_success_rate == 1.0);
        CHECK(r.strategy.grasp_point == env.grasp_point);
    }
    SUBCASE("deterministic under a fixed seed") {
        const auto env = cube_environment();
        const auto a = refine_grasp(env, small_ppo(60));
        const auto b = refine_grasp(env, small_ppo(60));
        CHECK(a.batch_success == b.batch_success);
        CHECK(a.train_success_rate == b.train_success_rate);
        CHECK(a.eval_success_rate == b.eval_success_rate);
        CHECK(a.strategy.grasp_point == b.strategy.grasp_point);
        CHECK(a.strategy.joint_angles == b.strategy.joint_angles);
        CHECK_NOTHROW(a.strategy.validate());
    }
    SUBCASE("bad config") {
        PpoConfig cfg;
        cfg.clip = 1.5;
        CHECK_THROWS_AS(refine_grasp(cube_environment(), cfg), DomainError);
    }
}

TEST_CASE("refinement report") {
    std::ostringstream out;
    write_refine_report(out, {{"lift", "lift_0", 1000, 0.875, 0.93, 0.0012}});
    CHECK(out.str() == "task,object_id,episodes,train_success_rate,eval_success_rate,chamfer_d_prime\n"
                       "lift,lift_0,1000,0.875,0.93,0.0012\n");
}
