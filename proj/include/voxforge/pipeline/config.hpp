// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include <json.hpp>

#include "voxforge/afford/knowledge_base.hpp"
#include "voxforge/grasp/ppo.hpp"
#include "voxforge/rgan/model.hpp"
#include "voxforge/scan/camera.hpp"

namespace voxforge::pipeline {

struct ScanSection {
    int views{scan::kDefaultViewCount};
    double radius{scan::kDefaultRadius};
    int image_size{scan::kDefaultImageSize};
    double fov{0.25};
    std::size_t train_views{3};  // evenly spaced subset of the rendered views fed to the network
};

// One JSON document driving the whole pipeline:
//   scan{views, radius, image_size, fov, train_views}, grid{m},
//   train{R-GAN config}, retrieve{kb_path, category},
//   refine{PPO config}, io{mesh, out_dir, seed}.
// Paths are relative to the config file.
struct PipelineConfig {
    ScanSection scan;
    rgan::RganConfig train;  // grid_dim comes from grid.m
    std::optional<std::filesystem::path> kb_path;  // toy knowledge base when absent
    afford::Category category{afford::Category::lift};
    grasp::PpoConfig refine;
    std::filesystem::path mesh;
    std::filesystem::path out_dir;
    std::uint64_t seed{0};

    // Sets io.seed and the training and refinement seeds together. An io.seed
    // in the file does the same; without one the section seeds stand.
    void set_seed(std::uint64_t s);
};

// Throws UsageError on unknown keys, wrong types or invalid values.
PipelineConfig pipeline_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
// Adds IoError for an unreadable or unparsable file.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

// VOXFORGE_SEED, when set. Throws UsageError unless it is a non-negative integer.
std::optional<std::uint64_t> seed_from_env();

}  // namespace voxforge::pipeline
