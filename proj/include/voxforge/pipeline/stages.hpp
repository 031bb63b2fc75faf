// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "voxforge/afford/knowledge_base.hpp"
#include "voxforge/grasp/refine.hpp"
#include "voxforge/pipeline/config.hpp"
#include "voxforge/rgan/dataset.hpp"
#include "voxforge/scan/render.hpp"
#include "voxforge/voxel/metrics.hpp"

namespace voxforge::pipeline {

struct RenderOptions {
    int views{scan::kDefaultViewCount};
    double radius{scan::kDefaultRadius};
    int image_size{scan::kDefaultImageSize};
    double fov{0.25};
};

struct Rendering {
    std::vector<scan::Camera> cameras;
    std::vector<scan::DepthImage> images;
};

Rendering render_views(const scan::TriangleMesh& mesh, const RenderOptions& opts);
// view_000.dpt, view_001.dpt, ... and cameras.json. Returns the written paths.
std::vector<std::filesystem::path> save_rendering(const std::filesystem::path& dir, const Rendering& r);

// Evenly spaced picks of k out of n, starting at 0.
std::vector<std::size_t> spread_indices(std::size_t n, std::size_t k);

// Back-projects and voxelizes the chosen images in `frame`; the truth is
// the mesh's solid fill.
rgan::Sample sample_from_rendering(const std::string& name, const scan::TriangleMesh& mesh, const Rendering& r,
                                   std::span<const std::size_t> chosen, const voxel::Frame& frame);

struct Dataset {
    std::vector<rgan::Sample> samples;
    std::vector<std::string> categories;  // one per sample, for per-category report rows
};

// Throws DomainError unless the name is a safe file stem.
void check_object_name(const std::string& name);
// <dir>/dataset.json plus <dir>/<name>/truth.vxg and view_<k>.vxg.
void save_dataset(const std::filesystem::path& dir, const Dataset& d);
Dataset load_dataset(const std::filesystem::path& dir);

struct EvalRow {
    std::string object;
    std::string category;
    voxel::MetricReport metrics;
};

// Per-object rows, then one unweighted mean row per category in order of
// first appearance, then an overall mean when there is more than one
// category.
void write_evaluation_csv(std::ostream& out, const std::vector<EvalRow>& rows);

nlohmann::json retrieval_to_json(const afford::KnowledgeBase& kb, const afford::Retrieval& r,
                                 const afford::GraspStrategy& transferred);

struct RefineOutcome {
    afford::Retrieval retrieval;
    afford::GraspStrategy seed;
    grasp::RefineResult result;
    grasp::RefineReportRow row;
};

// Retrieves a seed strategy for the reconstruction, transfers it, and
// refines it on an environment built from the reconstructed grid.
RefineOutcome refine_reconstruction(const voxel::VoxelGrid& recon, afford::Category category,
                                    const afford::KnowledgeBase& kb, const grasp::PpoConfig& cfg);
nlohmann::json refine_to_json(const RefineOutcome& r, const afford::KnowledgeBase& kb);

// Runs every stage and writes its artifacts under cfg.out_dir. Progress
// lines go to `log`. Returns the artifact paths relative to out_dir.
std::vector<std::filesystem::path> run_pipeline(const PipelineConfig& cfg, std::ostream& log);

}  // namespace voxforge::pipeline
