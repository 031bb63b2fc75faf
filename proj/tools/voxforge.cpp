// SPDX-License-Identifier: Apache-2.0
//
// voxforge: command-line front end for scanning, reconstruction,
// evaluation, retrieval and grasp refinement.

#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "voxforge/afford/toy_kb.hpp"
#include "voxforge/error.hpp"
#include "voxforge/pipeline/json_io.hpp"
#include "voxforge/pipeline/stages.hpp"
#include "voxforge/rgan/config_io.hpp"
#include "voxforge/voxel/convert.hpp"
#include "voxforge/voxel/io.hpp"

namespace fs = std::filesystem;
using namespace voxforge;

namespace {

enum Exit : int { kOk = 0, kIo = 2, kDomain = 3, kUsage = 64 };

const std::vector<std::string> kCategoryNames = {"handle_grasp", "wrap_grasp", "lift", "press"};

// An explicit --seed wins, then VOXFORGE_SEED, then the config.
std::optional<std::uint64_t> effective_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return flag;
    return pipeline::seed_from_env();
}

afford::KnowledgeBase knowledge_base(const std::string& path) {
    return path.empty() ? afford::toy_knowledge_base() : afford::kb_load(path);
}

voxel::PointCloud load_cloud(const fs::path& p) {
    if (p.extension() == ".vxg") return voxel::devoxelize(voxel::load_vxg(p));
    return voxel::load_ply(p);
}

// Writes through a temporary so a failed command leaves no partial file.
template <typename F>
void write_file(const fs::path& path, F&& body) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot write " + path.string());
        body(out);
        if (!out) throw IoError("write failed: " + path.string());
    }
    fs::rename(tmp, path);
}

template <typename F>
void write_or_print(const std::string& path, F&& body) {
    if (path.empty() || path == "-")
        body(std::cout);
    else
        write_file(path, body);
}

struct RenderArgs {
    std::string mesh, out;
    pipeline::RenderOptions opts;
};

int cmd_render(const RenderArgs& a) {
    const auto mesh = scan::load_mesh(a.mesh);
    const auto r = pipeline::render_views(mesh, a.opts);
    pipeline::save_rendering(a.out, r);
    std::cerr << "wrote " << r.images.size() << " depth images to " << a.out << '\n';
    return kOk;
}

struct DatasetArgs {
    std::vector<std::string> meshes;
    bool procedural{false};
    std::optional<unsigned> perturbed;
    std::string out, category{"object"};
    rgan::ScanOptions scan;
};

int cmd_dataset(const DatasetArgs& a) {
    std::vector<scan::shapes::NamedMesh> meshes;
    if (a.procedural) meshes = scan::shapes::toy_set();
    if (a.perturbed)
        for (auto& m : scan::shapes::perturbed_toy_set(*a.perturbed)) meshes.push_back(std::move(m));
    for (const auto& p : a.meshes) meshes.push_back({fs::path(p).stem().string(), scan::load_mesh(p)});
    if (meshes.empty()) throw UsageError("dataset needs mesh files, --procedural or --perturbed");
    for (const auto& m : meshes) pipeline::check_object_name(m.name);
    pipeline::Dataset d;
    d.samples = rgan::make_dataset(meshes, a.scan);
    d.categories.assign(d.samples.size(), a.category);
    pipeline::save_dataset(a.out, d);
    std::cerr << "wrote " << d.samples.size() << " objects to " << a.out << '\n';
    return kOk;
}

struct TrainArgs {
    std::string dataset, out, config;
    std::optional<int> epochs;
    std::optional<std::uint64_t> seed;
    int checkpoint_every{0};
    double stop_at_iou{0.0};
};

int cmd_train(const TrainArgs& a) {
    const auto data = pipeline::load_dataset(a.dataset);
    const int m = data.samples[0].truth.frame().dims.x;
    std::size_t views = 0;
    for (const auto& s : data.samples) views = std::max(views, s.views.views.size());
    rgan::RganConfig cfg;
    if (!a.config.empty()) {
        cfg = rgan::config_from_json(pipeline::load_json(a.config));
        if (cfg.grid_dim != m)
            throw DomainError("config grid_dim " + std::to_string(cfg.grid_dim) + " does not match the dataset's " +
                              std::to_string(m));
    } else {
        cfg.grid_dim = m;
        cfg.max_views = std::max(cfg.max_views, views);
    }
    if (a.epochs) cfg.epochs = *a.epochs;
    if (const auto s = effective_seed(a.seed)) cfg.seed = *s;
    cfg.validate();

    rgan::TrainOptions opts;
    opts.checkpoint_dir = a.out;
    opts.checkpoint_every = a.checkpoint_every;
    opts.stop_at_iou = a.stop_at_iou;
    opts.on_epoch = [](const rgan::EpochLog& e) {
        if (e.epoch % 10 == 0 || e.epoch == 1)
            std::cerr << "epoch " << e.epoch << " recon " << e.gen_recon_loss << " iou " << e.mean_train_iou << '\n';
    };
    const auto result = rgan::train(data.samples, cfg, opts);
    rgan::save_checkpoint(a.out, result.gen, result.dis, static_cast<int>(result.log.size()));
    rgan::save_training_log(fs::path(a.out) / "training_log.csv", result.log);
    std::cerr << "final mean IoU " << result.log.back().mean_train_iou << '\n';
    return kOk;
}

struct ReconstructArgs {
    std::string checkpoint, dataset, out, out_dir, ply;
    std::vector<std::string> views;
    double threshold{0.5};
};

int cmd_reconstruct(const ReconstructArgs& a) {
    const auto ck = rgan::load_checkpoint(a.checkpoint);
    if (!a.dataset.empty()) {
        if (a.out_dir.empty()) throw UsageError("reconstruct --dataset needs --out-dir");
        const auto data = pipeline::load_dataset(a.dataset);
        fs::create_directories(a.out_dir);
        for (const auto& s : data.samples)
            voxel::save_vxg(fs::path(a.out_dir) / (s.name + ".vxg"), rgan::reconstruct(s.views, ck.gen, a.threshold));
        std::cerr << "wrote " << data.samples.size() << " reconstructions to " << a.out_dir << '\n';
        return kOk;
    }
    if (a.views.empty() || a.out.empty()) throw UsageError("reconstruct needs --views and --out, or --dataset");
    rgan::ViewSequence seq;
    for (const auto& v : a.views) seq.views.push_back(voxel::load_vxg(v));
    const auto recon = rgan::reconstruct(seq, ck.gen, a.threshold);
    write_file(a.out, [&](std::ostream& o) { voxel::write_vxg(o, recon); });
    if (!a.ply.empty()) write_file(a.ply, [&](std::ostream& o) { voxel::write_ply(o, voxel::devoxelize(recon)); });
    return kOk;
}

struct EvaluateArgs {
    std::string dataset, recon_dir, recon, truth, name, category{"object"}, out;
};

int cmd_evaluate(const EvaluateArgs& a) {
    std::vector<pipeline::EvalRow> rows;
    if (!a.dataset.empty()) {
        if (a.recon_dir.empty()) throw UsageError("evaluate --dataset needs --recon-dir");
        const auto data = pipeline::load_dataset(a.dataset);
        for (std::size_t i = 0; i < data.samples.size(); ++i) {
            const auto& s = data.samples[i];
            const auto recon = voxel::load_vxg(fs::path(a.recon_dir) / (s.name + ".vxg"));
            rows.push_back({s.name, data.categories[i], voxel::evaluate(recon, s.truth)});
        }
    } else {
        if (a.recon.empty() || a.truth.empty()) throw UsageError("evaluate needs --recon and --truth, or --dataset");
        const std::string name = a.name.empty() ? fs::path(a.recon).stem().string() : a.name;
        rows.push_back({name, a.category, voxel::evaluate(voxel::load_vxg(a.recon), voxel::load_vxg(a.truth))});
    }
    write_or_print(a.out, [&](std::ostream& o) { pipeline::write_evaluation_csv(o, rows); });
    return kOk;
}

struct RetrieveArgs {
    std::string cloud, category, kb, out;
};

int cmd_retrieve(const RetrieveArgs& a) {
    const auto cloud = load_cloud(a.cloud);
    const auto kb = knowledge_base(a.kb);
    const auto r = afford::retrieve(cloud, afford::parse_category(a.category), kb);
    const auto transferred = afford::transfer_strategy(kb.entries()[r.index], cloud);
    const auto j = pipeline::retrieval_to_json(kb, r, transferred);
    write_or_print(a.out, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
    return kOk;
}

struct RefineArgs {
    std::string recon, category, kb, out, json_out, config;
    std::optional<int> episodes;
    std::optional<std::uint64_t> seed;
};

int cmd_refine(const RefineArgs& a) {
    const auto recon = voxel::load_vxg(a.recon);
    const auto kb = knowledge_base(a.kb);
    auto cfg = a.config.empty() ? grasp::PpoConfig{} : pipeline::ppo_config_from_json(pipeline::load_json(a.config));
    if (a.episodes) cfg.episodes = *a.episodes;
    if (const auto s = effective_seed(a.seed)) cfg.seed = *s;
    cfg.validate();
    const auto r = pipeline::refine_reconstruction(recon, afford::parse_category(a.category), kb, cfg);
    write_or_print(a.out, [&](std::ostream& o) { grasp::write_refine_report(o, {r.row}); });
    if (!a.json_out.empty())
        write_file(a.json_out, [&](std::ostream& o) { o << pipeline::refine_to_json(r, kb).dump(2) << '\n'; });
    return kOk;
}

struct PipelineArgs {
    std::string config, out;
    std::optional<std::uint64_t> seed;
};

int cmd_pipeline(const PipelineArgs& a) {
    auto cfg = pipeline::load_pipeline_config(a.config);
    if (const auto s = effective_seed(a.seed)) cfg.set_seed(*s);
    if (!a.out.empty()) cfg.out_dir = a.out;
    const auto artifacts = pipeline::run_pipeline(cfg, std::cerr);
    std::cerr << "wrote " << artifacts.size() << " artifacts to " << cfg.out_dir.string() << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"voxforge: multi-view volumetric reconstruction and grasp refinement"};
    app.require_subcommand(1);
    int code = kOk;

    RenderArgs render;
    auto* sc = app.add_subcommand("render", "Render depth scans of a mesh from a hemisphere of viewpoints");
    sc->add_option("mesh", render.mesh, "OBJ or STL mesh")->required();
    sc->add_option("-o,--out", render.out, "Output directory")->required();
    sc->add_option("--views", render.opts.views, "Number of viewpoints")->capture_default_str();
    sc->add_option("--radius", render.opts.radius, "Camera distance, m")->capture_default_str();
    sc->add_option("--size", render.opts.image_size, "Image edge, pixels")->capture_default_str();
    sc->add_option("--fov", render.opts.fov, "Vertical field of view, rad")->capture_default_str();
    sc->callback([&] { code = cmd_render(render); });

    DatasetArgs dataset;
    sc = app.add_subcommand("dataset", "Build view and solid-truth grids for a set of meshes");
    sc->add_option("meshes", dataset.meshes, "OBJ or STL meshes");
    sc->add_flag("--procedural", dataset.procedural, "Include the five procedural toy shapes");
    sc->add_option("--perturbed", dataset.perturbed, "Include perturbed toy shapes drawn with this seed");
    sc->add_option("-o,--out", dataset.out, "Output directory")->required();
    sc->add_option("--grid", dataset.scan.grid_dim, "Grid edge m")->capture_default_str();
    sc->add_option("--views", dataset.scan.views, "Views per object")->capture_default_str();
    sc->add_option("--size", dataset.scan.image_size, "Image edge, pixels")->capture_default_str();
    sc->add_option("--radius", dataset.scan.radius, "Camera distance, m")->capture_default_str();
    sc->add_option("--category", dataset.category, "Category label for reports")->capture_default_str();
    sc->callback([&] { code = cmd_dataset(dataset); });

    TrainArgs train;
    sc = app.add_subcommand("train", "Train the R-GAN on a dataset");
    sc->add_option("-d,--dataset", train.dataset, "Dataset directory")->required();
    sc->add_option("-o,--out", train.out, "Checkpoint directory")->required();
    sc->add_option("-c,--config", train.config, "R-GAN config JSON");
    sc->add_option("--epochs", train.epochs, "Override the configured epoch count");
    sc->add_option("--seed", train.seed, "Override the configured seed");
    sc->add_option("--checkpoint-every", train.checkpoint_every, "Checkpoint period in epochs");
    sc->add_option("--stop-at-iou", train.stop_at_iou, "Stop once mean training IoU reaches this");
    sc->callback([&] { code = cmd_train(train); });

    ReconstructArgs recon;
    sc = app.add_subcommand("reconstruct", "Reconstruct solid grids from view grids");
    sc->add_option("-m,--checkpoint", recon.checkpoint, "Checkpoint directory")->required();
    sc->add_option("--views", recon.views, "View grids (VXG1), in sequence order");
    sc->add_option("-o,--out", recon.out, "Output grid (VXG1)");
    sc->add_option("--ply", recon.ply, "Also write the occupied voxel centers as PLY");
    sc->add_option("-d,--dataset", recon.dataset, "Reconstruct every object of a dataset");
    sc->add_option("--out-dir", recon.out_dir, "Output directory for --dataset");
    sc->add_option("--threshold", recon.threshold, "Occupancy threshold")->capture_default_str();
    sc->callback([&] { code = cmd_reconstruct(recon); });

    EvaluateArgs eval;
    sc = app.add_subcommand("evaluate", "IoU, hit rate and accuracy per object and per category");
    sc->add_option("-d,--dataset", eval.dataset, "Dataset with the truth grids");
    sc->add_option("--recon-dir", eval.recon_dir, "Directory of <name>.vxg reconstructions");
    sc->add_option("--recon", eval.recon, "Single reconstruction grid");
    sc->add_option("--truth", eval.truth, "Single truth grid");
    sc->add_option("--name", eval.name, "Object name for the single-pair row");
    sc->add_option("--category", eval.category, "Category for the single-pair row")->capture_default_str();
    sc->add_option("-o,--out", eval.out, "CSV path (stdout when absent)");
    sc->callback([&] { code = cmd_evaluate(eval); });

    RetrieveArgs ret;
    sc = app.add_subcommand("retrieve", "Find the closest knowledge-base entry and transfer its grasp");
    sc->add_option("cloud", ret.cloud, "Reconstruction as PLY or VXG1")->required();
    sc->add_option("--category", ret.category, "Affordance category")->required()->check(CLI::IsMember(kCategoryNames));
    sc->add_option("--kb", ret.kb, "Knowledge base manifest (toy base when absent)");
    sc->add_option("-o,--out", ret.out, "JSON path (stdout when absent)");
    sc->callback([&] { code = cmd_retrieve(ret); });

    RefineArgs ref;
    sc = app.add_subcommand("refine", "Retrieve a seed grasp and refine it with PPO on the reconstruction");
    sc->add_option("recon", ref.recon, "Reconstruction grid (VXG1)")->required();
    sc->add_option("--category", ref.category, "Affordance category")->required()->check(CLI::IsMember(kCategoryNames));
    sc->add_option("--kb", ref.kb, "Knowledge base manifest (toy base when absent)");
    sc->add_option("-c,--config", ref.config, "PPO config JSON");
    sc->add_option("--episodes", ref.episodes, "Override the configured episode count");
    sc->add_option("--seed", ref.seed, "Override the configured seed");
    sc->add_option("-o,--out", ref.out, "Report CSV path (stdout when absent)");
    sc->add_option("--json", ref.json_out, "Also write retrieval and refined strategy as JSON");
    sc->callback([&] { code = cmd_refine(ref); });

    PipelineArgs pipe;
    sc = app.add_subcommand("pipeline", "Run render, train, reconstruct, evaluate, retrieve and refine");
    sc->add_option("-c,--config", pipe.config, "Pipeline config JSON")->required();
    sc->add_option("-o,--out", pipe.out, "Override io.out_dir");
    sc->add_option("--seed", pipe.seed, "Override the configured seed");
    sc->callback([&] { code = cmd_pipeline(pipe); });

    try {
        app.parse(argc, argv);
        return code;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDomain;
    }
}
