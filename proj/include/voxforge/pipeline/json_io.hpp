// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <json.hpp>

#include "voxforge/afford/knowledge_base.hpp"
#include "voxforge/grasp/ppo.hpp"
#include "voxforge/scan/camera.hpp"

namespace voxforge::pipeline {

nlohmann::json ppo_config_to_json(const grasp::PpoConfig& cfg);
// Missing keys keep their defaults; unknown keys or wrong types throw
// DomainError. The result is validated.
grasp::PpoConfig ppo_config_from_json(const nlohmann::json& j);

nlohmann::json strategy_to_json(const afford::GraspStrategy& s);
nlohmann::json camera_to_json(const scan::Camera& cam);

// Writes `j` with two-space indentation and a trailing newline.
void save_json(const std::filesystem::path& path, const nlohmann::json& j);
// Throws IoError naming the file when it cannot be read or parsed.
nlohmann::json load_json(const std::filesystem::path& path);

}  // namespace voxforge::pipeline
