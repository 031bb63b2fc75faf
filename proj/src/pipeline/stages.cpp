// SPDX-License-Identifier: Apache-2.0

#include "voxforge/pipeline/stages.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "voxforge/afford/toy_kb.hpp"
#include "voxforge/error.hpp"
#include "voxforge/grasp/env.hpp"
#include "voxforge/pipeline/json_io.hpp"
#include "voxforge/rgan/train.hpp"
#include "voxforge/scan/bvh.hpp"
#include "voxforge/scan/solid.hpp"
#include "voxforge/util/format.hpp"
#include "voxforge/voxel/convert.hpp"
#include "voxforge/voxel/io.hpp"

namespace voxforge::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;
using util::format_number;

Rendering render_views(const scan::TriangleMesh& mesh, const RenderOptions& opts) {
    if (mesh.empty()) throw DomainError("cannot render an empty mesh");
    const auto [lo, hi] = mesh.bounds();
    Rendering r;
    r.cameras = scan::hemisphere_views(opts.views, opts.radius, 0.5 * (lo + hi), opts.fov, opts.image_size);
    r.images.resize(r.cameras.size());
    const scan::Bvh bvh(mesh);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < r.cameras.size(); ++i) r.images[i] = scan::render_depth(bvh, r.cameras[i]);
    return r;
}

std::vector<fs::path> save_rendering(const fs::path& dir, const Rendering& r) {
    fs::create_directories(dir);
    std::vector<fs::path> written;
    json cams = json::array();
    for (std::size_t i = 0; i < r.images.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "view_%03zu.dpt", i);
        scan::save_dpt(dir / name, r.images[i]);
        written.push_back(dir / name);
        json c = camera_to_json(r.cameras[i]);
        c["depth"] = name;
        cams.push_back(std::move(c));
    }
    save_json(dir / "cameras.json", cams);
    written.push_back(dir / "cameras.json");
    return written;
}

std::vector<std::size_t> spread_indices(std::size_t n, std::size_t k) {
    if (k == 0 || k > n) throw DomainError("spread_indices needs 1 <= k <= n");
    std::vector<std::size_t> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = i * n / k;
    return out;
}

rgan::Sample sample_from_rendering(const std::string& name, const scan::TriangleMesh& mesh, const Rendering& r,
                                   std::span<const std::size_t> chosen, const voxel::Frame& frame) {
    rgan::Sample s{name, {}, scan::mesh_to_solid_grid(mesh, frame)};
    for (std::size_t i : chosen) {
        const auto cloud = scan::backproject(r.images.at(i), r.cameras.at(i));
        s.views.views.push_back(voxel::voxelize(cloud, frame).grid);
    }
    return s;
}

void check_object_name(const std::string& name) {
    const bool ok = !name.empty() && name.size() <= 128 && name.front() != '.' &&
                    std::all_of(name.begin(), name.end(), [](char c) {
                        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                               c == '_' || c == '-' || c == '.';
                    });
    if (!ok) throw DomainError("object name '" + name + "' must use only letters, digits, '_', '-' and '.'");
}

void save_dataset(const fs::path& dir, const Dataset& d) {
    if (d.samples.size() != d.categories.size()) throw DomainError("dataset needs one category per sample");
    json objects = json::array();
    for (std::size_t i = 0; i < d.samples.size(); ++i) {
        const auto& s = d.samples[i];
        check_object_name(s.name);
        fs::create_directories(dir / s.name);
        voxel::save_vxg(dir / s.name / "truth.vxg", s.truth);
        json views = json::array();
        for (std::size_t k = 0; k < s.views.views.size(); ++k) {
            const std::string rel = s.name + "/view_" + std::to_string(k) + ".vxg";
            voxel::save_vxg(dir / rel, s.views.views[k]);
            views.push_back(rel);
        }
        objects.push_back(
            {{"name", s.name}, {"category", d.categories[i]}, {"truth", s.name + "/truth.vxg"}, {"views", views}});
    }
    save_json(dir / "dataset.json", {{"format", "voxforge-dataset"}, {"objects", objects}});
}

Dataset load_dataset(const fs::path& dir) {
    const fs::path manifest = dir / "dataset.json";
    const json j = load_json(manifest);
    Dataset d;
    try {
        if (j.at("format") != "voxforge-dataset") throw IoError(manifest.string() + ": not a dataset manifest");
        for (const auto& o : j.at("objects")) {
            rgan::Sample s{o.at("name").get<std::string>(), {},
                           voxel::load_vxg(dir / o.at("truth").get<std::string>())};
            check_object_name(s.name);
            for (const auto& v : o.at("views")) {
                s.views.views.push_back(voxel::load_vxg(dir / v.get<std::string>()));
                if (!(s.views.views.back().frame() == s.truth.frame()))
                    throw DomainError(manifest.string() + ": view frames of '" + s.name + "' differ from its truth");
            }
            if (s.views.views.empty()) throw DomainError(manifest.string() + ": '" + s.name + "' has no views");
            d.categories.push_back(o.at("category").get<std::string>());
            d.samples.push_back(std::move(s));
        }
    } catch (const json::exception& e) {
        throw IoError(manifest.string() + ": " + e.what());
    }
    if (d.samples.empty()) throw DomainError(manifest.string() + ": dataset has no objects");
    return d;
}

namespace {

void metric_row(std::ostream& out, const std::string& object, const std::string& category, double iou, double hr,
                double acc) {
    out << object << ',' << category << ',' << format_number(iou) << ',' << format_number(hr) << ','
        << format_number(acc) << '\n';
}

void mean_row(std::ostream& out, const std::string& label, const std::vector<const EvalRow*>& rows) {
    double iou = 0.0, hr = 0.0, acc = 0.0;
    for (const auto* r : rows) {
        iou += r->metrics.iou;
        hr += r->metrics.hit_rate;
        acc += r->metrics.accuracy;
    }
    const double n = static_cast<double>(rows.size());
    metric_row(out, "mean", label, iou / n, hr / n, acc / n);
}

}  // namespace

void write_evaluation_csv(std::ostream& out, const std::vector<EvalRow>& rows) {
    out << "object,category,iou,hit_rate,accuracy\n";
    std::vector<std::string> order;
    for (const auto& r : rows) {
        metric_row(out, r.object, r.category, r.metrics.iou, r.metrics.hit_rate, r.metrics.accuracy);
        if (std::find(order.begin(), order.end(), r.category) == order.end()) order.push_back(r.category);
    }
    std::vector<const EvalRow*> all;
    for (const auto& r : rows) all.push_back(&r);
    for (const auto& c : order) {
        std::vector<const EvalRow*> in;
        for (const auto& r : rows)
            if (r.category == c) in.push_back(&r);
        mean_row(out, c, in);
    }
    if (order.size() > 1) mean_row(out, "all", all);
}

json retrieval_to_json(const afford::KnowledgeBase& kb, const afford::Retrieval& r,
                       const afford::GraspStrategy& transferred) {
    const auto& e = kb.entries().at(r.index);
    return {{"entry_id", e.id},
            {"category", afford::to_string(e.category)},
            {"d_prime", r.distance},
            {"transferred_strategy", strategy_to_json(transferred)}};
}

RefineOutcome refine_reconstruction(const voxel::VoxelGrid& recon, afford::Category category,
                                    const afford::KnowledgeBase& kb, const grasp::PpoConfig& cfg) {
    auto cloud = voxel::devoxelize(recon);
    if (cloud.empty()) throw DomainError("reconstruction is empty; nothing to grasp");
    RefineOutcome o;
    o.retrieval = afford::retrieve(cloud, category, kb);
    const auto& entry = kb.entries()[o.retrieval.index];
    o.seed = afford::transfer_strategy(entry, cloud);
    const grasp::GraspEnv env(std::move(cloud), recon, o.seed);
    o.result = grasp::refine_grasp(env, cfg);
    o.row = {std::string(afford::to_string(category)), entry.id, o.result.episodes, o.result.train_success_rate,
             o.result.eval_success_rate, o.retrieval.distance};
    return o;
}

json refine_to_json(const RefineOutcome& r, const afford::KnowledgeBase& kb) {
    json j = retrieval_to_json(kb, r.retrieval, r.seed);
    j["refined_strategy"] = strategy_to_json(r.result.strategy);
    j["episodes"] = r.result.episodes;
    j["train_success_rate"] = r.result.train_success_rate;
    j["eval_success_rate"] = r.result.eval_success_rate;
    j["batch_success"] = r.result.batch_success;
    return j;
}

std::vector<fs::path> run_pipeline(const PipelineConfig& cfg, std::ostream& log) {
    const auto mesh = scan::load_mesh(cfg.mesh);
    const std::string name = cfg.mesh.stem().string();
    check_object_name(name);
    const fs::path out = cfg.out_dir;
    fs::create_directories(out);
    std::vector<fs::path> artifacts;
    const auto keep = [&](const fs::path& p) { artifacts.push_back(fs::relative(p, out)); };

    log << "render: " << cfg.scan.views << " views at " << cfg.scan.radius << " m\n";
    const RenderOptions ro{cfg.scan.views, cfg.scan.radius, cfg.scan.image_size, cfg.scan.fov};
    const Rendering rendering = render_views(mesh, ro);
    for (const auto& p : save_rendering(out / "render", rendering)) keep(p);

    const auto chosen = spread_indices(rendering.images.size(), cfg.scan.train_views);
    const auto frame = rgan::object_frame(mesh, cfg.train.grid_dim);
    const Dataset data{{sample_from_rendering(name, mesh, rendering, chosen, frame)},
                       {std::string(afford::to_string(cfg.category))}};
    save_dataset(out / "dataset", data);
    keep(out / "dataset" / "dataset.json");

    log << "train: " << cfg.train.epochs << " epochs at " << cfg.train.grid_dim << "^3\n";
    const auto trained = rgan::train(data.samples, cfg.train);
    rgan::save_checkpoint(out / "model", trained.gen, trained.dis, static_cast<int>(trained.log.size()));
    keep(out / "model" / "rgan.json");
    rgan::save_training_log(out / "training_log.csv", trained.log);
    keep(out / "training_log.csv");

    log << "reconstruct\n";
    const auto recon = rgan::reconstruct(data.samples[0].views, trained.gen);
    voxel::save_vxg(out / "recon.vxg", recon);
    voxel::save_ply(out / "recon.ply", voxel::devoxelize(recon));
    keep(out / "recon.vxg");
    keep(out / "recon.ply");

    const EvalRow row{name, data.categories[0], voxel::evaluate(recon, data.samples[0].truth)};
    {
        std::ofstream csv(out / "evaluation.csv", std::ios::binary);
        write_evaluation_csv(csv, {row});
        if (!csv) throw IoError("cannot write " + (out / "evaluation.csv").string());
    }
    keep(out / "evaluation.csv");
    log << "evaluate: iou " << format_number(row.metrics.iou) << '\n';

    const auto kb = cfg.kb_path ? afford::kb_load(*cfg.kb_path) : afford::toy_knowledge_base();
    log << "retrieve and refine: " << afford::to_string(cfg.category) << ", " << cfg.refine.episodes
        << " episodes\n";
    const auto refined = refine_reconstruction(recon, cfg.category, kb, cfg.refine);
    save_json(out / "retrieval.json", retrieval_to_json(kb, refined.retrieval, refined.seed));
    keep(out / "retrieval.json");
    save_json(out / "refine.json", refine_to_json(refined, kb));
    keep(out / "refine.json");
    {
        std::ofstream csv(out / "refine.csv", std::ios::binary);
        grasp::write_refine_report(csv, {refined.row});
        if (!csv) throw IoError("cannot write " + (out / "refine.csv").string());
    }
    keep(out / "refine.csv");
    log << "refine: eval success " << format_number(refined.result.eval_success_rate) << '\n';

    json listed = json::array();
    for (const auto& p : artifacts) listed.push_back(p.generic_string());
    save_json(out / "manifest.json", {{"format", "voxforge-pipeline"},
                                      {"mesh", cfg.mesh.filename().string()},
                                      {"seed", cfg.seed},
                                      {"epochs_run", trained.log.size()},
                                      {"iou", row.metrics.iou},
                                      {"entry_id", refined.row.object_id},
                                      {"eval_success_rate", refined.result.eval_success_rate},
                                      {"artifacts", listed}});
    artifacts.push_back("manifest.json");
    return artifacts;
}

}  // namespace voxforge::pipeline
