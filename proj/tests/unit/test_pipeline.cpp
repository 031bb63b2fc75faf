// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "voxforge/afford/toy_kb.hpp"
#include "voxforge/error.hpp"
#include "voxforge/pipeline/json_io.hpp"
#include "voxforge/pipeline/stages.hpp"
#include "voxforge/scan/shapes.hpp"

using namespace voxforge;
using namespace voxforge::pipeline;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json minimal() { return {{"io", {{"mesh", "m.obj"}}}}; }

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

voxel::MetricReport report(double iou, double hr, double acc) {
    voxel::MetricReport r;
    r.iou = iou;
    r.hit_rate = hr;
    r.accuracy = acc;
    return r;
}

}  // namespace

TEST_CASE("pipeline config") {
    const fs::path base = "/data/run";
    SUBCASE("defaults follow the scanning protocol") {
        const auto c = pipeline_config_from_json(minimal(), base);
        CHECK(c.scan.views == 125);
        CHECK(c.scan.radius == 1.6);
        CHECK(c.scan.image_size == 64);
        CHECK(c.train.grid_dim == 16);
        CHECK(c.mesh == base / "m.obj");
        CHECK(c.out_dir == base / "out");
        CHECK_FALSE(c.kb_path.has_value());
        CHECK(c.category == afford::Category::lift);
    }
    SUBCASE("sections are read and paths resolved") {
        json j = minimal();
        j["grid"] = {{"m", 8}};
        j["train"] = {{"epochs", 7}, {"latent", 32}};
        j["refine"] = {{"episodes", 50}};
        j["retrieve"] = {{"kb_path", "kb/kb.json"}, {"category", "press"}};
        j["io"]["out_dir"] = "/abs/out";
        j["io"]["seed"] = 42;
        const auto c = pipeline_config_from_json(j, base);
        CHECK(c.train.grid_dim == 8);
        CHECK(c.train.epochs == 7);
        CHECK(c.train.latent == 32);
        CHECK(c.refine.episodes == 50);
        CHECK(*c.kb_path == base / "kb/kb.json");
        CHECK(c.category == afford::Category::press);
        CHECK(c.out_dir == "/abs/out");
        CHECK(c.seed == 42);
        CHECK(c.train.seed == 42);
        CHECK(c.refine.seed == 42);
    }
    SUBCASE("rejections") {
        for (const char* bad : {R"({"io": {"mesh": "m.obj"}, "extra": 1})",
                                R"({"io": {"mesh": "m.obj", "path": "x"}})",
                                R"({"io": {"mesh": "m.obj"}, "scan": {"view": 3}})",
                                R"({"io": {"mesh": "m.obj"}, "train": {"epoch": 3}})",
                                R"({"io": {"mesh": "m.obj"}, "refine": {"clip": 3}})",
                                R"({"io": {"mesh": "m.obj"}, "retrieve": {"category": "poke"}})",
                                R"({"io": {"mesh": "m.obj"}, "grid": {"m": 12}})",
                                R"({"io": {"mesh": "m.obj"}, "grid": {"m": 8}, "train": {"grid_dim": 16}})",
                                R"({"io": {"mesh": "m.obj"}, "scan": {"views": 2, "train_views": 3}})",
                                R"({"io": {"mesh": "m.obj"}, "scan": {"radius": "far"}})",
                                R"({"io": {}})",
                                R"([1, 2])"})
            CHECK_THROWS_AS(pipeline_config_from_json(json::parse(bad), base), UsageError);
    }
    SUBCASE("unreadable file") {
        CHECK_THROWS_AS(load_pipeline_config("/nonexistent/p.json"), IoError);
    }
}

TEST_CASE("seed from the environment") {
    ::unsetenv("VOXFORGE_SEED");
    CHECK_FALSE(seed_from_env().has_value());
    ::setenv("VOXFORGE_SEED", "17", 1);
    CHECK(seed_from_env() == 17u);
    for (const char* bad : {"", "-3", "12x", "seed"}) {
        ::setenv("VOXFORGE_SEED", bad, 1);
        CHECK_THROWS_AS(seed_from_env(), UsageError);
    }
    ::unsetenv("VOXFORGE_SEED");
}

TEST_CASE("ppo config JSON") {
    grasp::PpoConfig c;
    c.episodes = 12;
    c.clip = 0.1;
    const auto back = ppo_config_from_json(ppo_config_to_json(c));
    CHECK(back.episodes == 12);
    CHECK(back.clip == 0.1);
    CHECK_THROWS_AS(ppo_config_from_json({{"episode", 3}}), DomainError);
    CHECK_THROWS_AS(ppo_config_from_json({{"gamma", 0.0}}), DomainError);
}

TEST_CASE("evaluation report") {
    SUBCASE("identity row") {
        const auto f = voxel::cube_frame(4, {}, 1.0);
        voxel::VoxelGrid g(f);
        g.set(5, true);
        std::ostringstream out;
        write_evaluation_csv(out, {{"a", "lift", voxel::evaluate(g, g)}});
        CHECK(lines(out.str()) ==
              std::vector<std::string>{"object,category,iou,hit_rate,accuracy", "a,lift,1,1,1", "mean,lift,1,1,1"});
    }
    SUBCASE("two objects, one category") {
        std::ostringstream out;
        write_evaluation_csv(out, {{"a", "c", report(0.5, 0.75, 1.0)}, {"b", "c", report(0.25, 0.25, 0.5)}});
        const auto l = lines(out.str());
        REQUIRE(l.size() == 4);
        CHECK(l[3] == "mean,c,0.375,0.5,0.75");
    }
    SUBCASE("category means are unweighted row means") {
        const std::vector<EvalRow> rows{{"a", "x", report(0.2, 0.4, 0.6)},
                                        {"b", "y", report(0.9, 0.9, 0.9)},
                                        {"c", "x", report(0.4, 0.6, 0.8)},
                                        {"d", "x", report(0.6, 0.8, 1.0)}};
        std::ostringstream out;
        write_evaluation_csv(out, rows);
        const auto l = lines(out.str());
        REQUIRE(l.size() == 1 + 4 + 2 + 1);
        CHECK(l[5] == "mean,x,0.4,0.6,0.8");
        CHECK(l[6] == "mean,y,0.9,0.9,0.9");
        // (0.2 + 0.9 + 0.4 + 0.6) / 4 etc.
        CHECK(l[7] == "mean,all,0.525,0.675,0.825");
    }
}

TEST_CASE("spread indices") {
    CHECK(spread_indices(125, 3) == std::vector<std::size_t>{0, 41, 83});
    CHECK(spread_indices(4, 4) == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK_THROWS_AS(spread_indices(3, 4), DomainError);
    CHECK_THROWS_AS(spread_indices(3, 0), DomainError);
}

TEST_CASE("rendering and dataset round trip") {
    const auto mesh = scan::shapes::cube(0.1);
    RenderOptions ro;
    ro.views = 5;
    ro.image_size = 24;
    const auto r = render_views(mesh, ro);
    REQUIRE(r.images.size() == 5);
    const auto dir = fs::temp_directory_path() / "voxforge_test_pipeline";
    fs::remove_all(dir);
    const auto files = save_rendering(dir / "render", r);
    CHECK(files.size() == 6);
    const auto cams = load_json(dir / "render" / "cameras.json");
    CHECK(cams.size() == 5);
    CHECK(cams[4]["depth"] == "view_004.dpt");
    CHECK(scan::load_dpt(dir / "render" / "view_002.dpt").depth.size() == 24u * 24u);

    const std::vector<std::size_t> chosen{0, 3};
    const auto frame = rgan::object_frame(mesh, 8);
    Dataset d{{sample_from_rendering("cube", mesh, r, chosen, frame)}, {"lift"}};
    CHECK(d.samples[0].views.views.size() == 2);
    save_dataset(dir / "ds", d);
    const auto back = load_dataset(dir / "ds");
    REQUIRE(back.samples.size() == 1);
    CHECK(back.categories[0] == "lift");
    CHECK(back.samples[0].name == "cube");
    CHECK(back.samples[0].truth == d.samples[0].truth);
    CHECK(back.samples[0].views.views == d.samples[0].views.views);

    CHECK_THROWS_AS(load_dataset(dir / "missing"), IoError);
    Dataset bad{{d.samples[0]}, {"lift"}};
    bad.samples[0].name = "../escape";
    CHECK_THROWS_AS(save_dataset(dir / "bad", bad), DomainError);
}

TEST_CASE("retrieval JSON") {
    const auto kb = afford::toy_knowledge_base();
    const auto& e = kb.entries()[4];
    const auto r = afford::retrieve(e.cloud, e.category, kb);
    const auto j = retrieval_to_json(kb, r, afford::transfer_strategy(kb.entries()[r.index], e.cloud));
    CHECK(j["entry_id"] == e.id);
    CHECK(j["d_prime"].get<double>() < 1e-20);
    CHECK(j["transferred_strategy"]["joint_angles"].size() == 8);
}
