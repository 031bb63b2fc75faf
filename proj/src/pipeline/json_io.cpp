// SPDX-License-Identifier: Apache-2.0

#include "voxforge/pipeline/json_io.hpp"

#include <fstream>
#include <set>
#include <string>

#include "voxforge/error.hpp"

namespace voxforge::pipeline {

using nlohmann::json;

json ppo_config_to_json(const grasp::PpoConfig& c) {
    return {{"clip", c.clip},
            {"gamma", c.gamma},
            {"gae_lambda", c.gae_lambda},
            {"update_epochs", c.update_epochs},
            {"minibatch", c.minibatch},
            {"hidden", c.hidden},
            {"lr", c.lr},
            {"seed", c.seed},
            {"episodes", c.episodes},
            {"episodes_per_batch", c.episodes_per_batch},
            {"entropy_coef", c.entropy_coef},
            {"value_coef", c.value_coef},
            {"init_log_std", c.init_log_std},
            {"action_scale", c.action_scale},
            {"eval_episodes", c.eval_episodes}};
}

namespace {

template <typename T>
void read(const json& j, const char* key, T& into) {
    if (!j.contains(key)) return;
    try {
        into = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw DomainError(std::string("ppo config key '") + key + "': " + e.what());
    }
}

}  // namespace

grasp::PpoConfig ppo_config_from_json(const json& j) {
    if (!j.is_object()) throw DomainError("ppo config must be a JSON object");
    grasp::PpoConfig c;
    const json defaults = ppo_config_to_json(c);
    for (const auto& [key, _] : j.items())
        if (!defaults.contains(key)) throw DomainError("unknown ppo config key '" + key + "'");
    read(j, "clip", c.clip);
    read(j, "gamma", c.gamma);
    read(j, "gae_lambda", c.gae_lambda);
    read(j, "update_epochs", c.update_epochs);
    read(j, "minibatch", c.minibatch);
    read(j, "hidden", c.hidden);
    read(j, "lr", c.lr);
    read(j, "seed", c.seed);
    read(j, "episodes", c.episodes);
    read(j, "episodes_per_batch", c.episodes_per_batch);
    read(j, "entropy_coef", c.entropy_coef);
    read(j, "value_coef", c.value_coef);
    read(j, "init_log_std", c.init_log_std);
    read(j, "action_scale", c.action_scale);
    read(j, "eval_episodes", c.eval_episodes);
    c.validate();
    return c;
}

json strategy_to_json(const afford::GraspStrategy& s) {
    const auto& p = s.grasp_point;
    const auto& q = s.wrist_orientation;
    return {{"grasp_point", {p.x, p.y, p.z}},
            {"wrist_orientation", {q.w, q.x, q.y, q.z}},
            {"joint_angles", s.joint_angles}};
}

json camera_to_json(const scan::Camera& c) {
    return {{"position", {c.position.x, c.position.y, c.position.z}},
            {"look_at", {c.look_at.x, c.look_at.y, c.look_at.z}},
            {"up", {c.up.x, c.up.y, c.up.z}},
            {"vertical_fov", c.vertical_fov},
            {"width", c.width},
            {"height", c.height}};
}

void save_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

}  // namespace voxforge::pipeline
