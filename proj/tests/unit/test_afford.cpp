// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "support/random.hpp"
#include "voxforge/afford/chamfer.hpp"
#include "voxforge/afford/toy_kb.hpp"
#include "voxforge/error.hpp"
#include "voxforge/voxel/io.hpp"

using namespace voxforge;
using namespace voxforge::afford;
using voxel::PointCloud;

namespace {

std::size_t brute_nearest(const PointCloud& c, const Vec3& q, double& best) {
    best = std::numeric_limits<double>::infinity();
    std::size_t idx = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double dx = q.x - c[i].x, dy = q.y - c[i].y, dz = q.z - c[i].z;
        const double d = dx * dx + dy * dy + dz * dz;
        if (d < best) {
            best = d;
            idx = i;
        }
    }
    return idx;
}

std::filesystem::path fresh_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("voxforge_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("kd-tree nearest distance equals brute force") {
    testing::Rng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const auto n = 1 + static_cast<std::size_t>(testing::uniform(rng, 0, 1000));
        const auto cloud = testing::random_cloud(rng, n);
        const KdTree tree(cloud);
        for (int q = 0; q < 50; ++q) {
            const Vec3 p{testing::uniform(rng, -1.5, 1.5), testing::uniform(rng, -1.5, 1.5),
                         testing::uniform(rng, -1.5, 1.5)};
            double best = 0;
            brute_nearest(cloud, p, best);
            CHECK(tree.nearest(p).squared_distance == best);
        }
    }
    SUBCASE("duplicate points") {
        PointCloud c({{0, 0, 0}, {0, 0, 0}, {1, 1, 1}, {1, 1, 1}});
        const KdTree tree(c);
        CHECK(tree.nearest({0.1, 0, 0}).squared_distance == doctest::Approx(0.01));
        CHECK(tree.nearest({1, 1, 1}).squared_distance == 0.0);
    }
    CHECK_THROWS_AS(KdTree(PointCloud{}), DomainError);
}

TEST_CASE("chamfer") {
    SUBCASE("hand case") {
        CHECK(chamfer(PointCloud({{0, 0, 0}}), PointCloud({{1, 0, 0}})) == 2.0);
    }
    SUBCASE("matches the double loop") {
        testing::Rng rng(22);
        for (int trial = 0; trial < 30; ++trial) {
            const auto a = testing::random_cloud(rng, 1 + static_cast<std::size_t>(testing::uniform(rng, 0, 400)));
            const auto b = testing::random_cloud(rng, 1 + static_cast<std::size_t>(testing::uniform(rng, 0, 400)), -0.5, 2.0);
            const double fast = chamfer(a, b);
            const double slow = reference::chamfer(a, b);
            CHECK(std::abs(fast - slow) <= 1e-9 * slow);
            CHECK(chamfer(b, a) == doctest::Approx(fast).epsilon(1e-12));
            CHECK(chamfer(a, a) == 0.0);
            CHECK(fast > 0.0);
        }
    }
    SUBCASE("zero only for equal point sets") {
        const PointCloud a({{0, 0, 0}, {1, 0, 0}});
        const PointCloud b({{1, 0, 0}, {0, 0, 0}, {0, 0, 0}});
        CHECK(chamfer(a, b) == 0.0);
        CHECK(chamfer(a, PointCloud({{0, 0, 0}})) > 0.0);
    }
    CHECK_THROWS_AS(chamfer(PointCloud{}, PointCloud({{0, 0, 0}})), DomainError);
    CHECK(chamfer_normalized(PointCloud({{0, 0, 0}}), PointCloud({{1, 0, 0}})) == 1.0);
}

TEST_CASE("retrieval against an exhaustive oracle") {
    const auto kb = toy_knowledge_base(3, 200);
    REQUIRE(kb.size() == 12);
    for (Category c : kCategories) CHECK(kb.in_category(c).size() == 3);

    testing::Rng rng(23);
    for (int q = 0; q < 20; ++q) {
        const Category cat = kCategories[q % 4];
        const auto query = testing::random_cloud(rng, 150, -0.1, 0.1).translated({0.4, -0.2, 1.0});
        const auto got = retrieve(query, cat, kb);
        CHECK(kb.entries()[got.index].category == cat);

        const auto centered = query.translated(-query.centroid());
        double best = std::numeric_limits<double>::infinity();
        std::string best_id;
        for (const auto& e : kb.entries()) {
            if (e.category != cat) continue;
            const double d = reference::chamfer(centered, e.cloud);
            if (d < best || (d == best && e.id < best_id)) {
                best = d;
                best_id = e.id;
            }
        }
        CHECK(kb.entries()[got.index].id == best_id);
        CHECK(got.distance == doctest::Approx(best).epsilon(1e-9));

        // Moving the query does not change the answer.
        const auto moved = retrieve(query.translated({-3.0, 2.0, 0.5}), cat, kb);
        CHECK(moved.index == got.index);
    }
}

TEST_CASE("retrieval edge cases") {
    const auto kb = toy_knowledge_base(4, 120);
    SUBCASE("an entry finds itself at distance zero") {
        for (std::size_t i = 0; i < kb.size(); ++i) {
            const auto& e = kb.entries()[i];
            const auto got = retrieve(e.cloud.translated({1, 2, 3}), e.category, kb);
            CHECK(got.index == i);
            CHECK(got.distance < 1e-20);
        }
    }
    SUBCASE("single-entry category and ties") {
        KnowledgeEntry a{"b_entry", Category::press, PointCloud({{0, 0, 0}, {1, 0, 0}}), {}};
        KnowledgeEntry b{"a_entry", Category::press, PointCloud({{0, 0, 0}, {1, 0, 0}}), {}};
        KnowledgeEntry c{"c_entry", Category::lift, PointCloud({{5, 0, 0}}), {}};
        const KnowledgeBase tie({a, b, c});
        const auto got = retrieve(PointCloud({{0, 0, 0}, {1, 0, 0}}), Category::press, tie);
        CHECK(tie.entries()[got.index].id == "a_entry");
        CHECK(tie.entries()[retrieve(PointCloud({{9, 9, 9}}), Category::lift, tie).index].id == "c_entry");
        CHECK_THROWS_AS(retrieve(PointCloud({{0, 0, 0}}), Category::wrap_grasp, tie), DomainError);
        CHECK_THROWS_AS(retrieve(PointCloud{}, Category::press, tie), DomainError);
    }
    CHECK_THROWS_AS(parse_category("pinch"), DomainError);
    CHECK(parse_category("wrap_grasp") == Category::wrap_grasp);
}

TEST_CASE("strategy transfer") {
    const auto kb = toy_knowledge_base(5, 150);
    const auto& e = kb.entries()[7];
    SUBCASE("identity") {
        const auto s = transfer_strategy(e, e.cloud);
        CHECK(norm(s.grasp_point - e.strategy.grasp_point) < 1e-12);
        CHECK(s.wrist_orientation == e.strategy.wrist_orientation);
        CHECK(s.joint_angles == e.strategy.joint_angles);
    }
    SUBCASE("uniform scale") {
        const auto s = transfer_strategy(e, e.cloud.scaled(2.0));
        CHECK(norm(s.grasp_point - 2.0 * e.strategy.grasp_point) < 1e-12);
        CHECK(s.joint_angles == e.strategy.joint_angles);
    }
    SUBCASE("translation") {
        const Vec3 t{0.3, -1.0, 2.0};
        const auto s = transfer_strategy(e, e.cloud.translated(t));
        CHECK(norm(s.grasp_point - (e.strategy.grasp_point + t)) < 1e-12);
    }
    SUBCASE("degenerate box") {
        CHECK_THROWS_AS(transfer_strategy(e, PointCloud({{0, 0, 0}, {1, 1, 0}})), DomainError);
    }
}

TEST_CASE("knowledge base files") {
    const auto dir = fresh_dir("kb");
    const auto kb = toy_knowledge_base(6, 50);
    kb_save(kb, dir / "kb.json");
    const auto back = kb_load(dir / "kb.json");
    REQUIRE(back.size() == kb.size());
    for (std::size_t i = 0; i < kb.size(); ++i) {
        CHECK(back.entries()[i].id == kb.entries()[i].id);
        CHECK(back.entries()[i].category == kb.entries()[i].category);
        CHECK(back.entries()[i].cloud == kb.entries()[i].cloud);
        CHECK(back.entries()[i].strategy == kb.entries()[i].strategy);
    }

    auto manifest = nlohmann::json::parse(std::ifstream(dir / "kb.json"));
    auto rewrite = [&](const nlohmann::json& doc) {
        std::ofstream(dir / "bad.json") << doc.dump();
        return dir / "bad.json";
    };
    SUBCASE("missing cloud names the entry") {
        auto doc = manifest;
        doc[2]["cloud"] = "clouds/nowhere.ply";
        try {
            kb_load(rewrite(doc));
            FAIL("expected an error");
        } catch (const IoError& e) {
            CHECK(std::string(e.what()).find(doc[2]["id"].get<std::string>()) != std::string::npos);
        }
    }
    SUBCASE("non-unit quaternion") {
        auto doc = manifest;
        doc[0]["grasp"]["quat"] = {0.5, 0.0, 0.0, 0.0};
        CHECK_THROWS_AS(kb_load(rewrite(doc)), DomainError);
    }
    SUBCASE("wrong joint count") {
        auto doc = manifest;
        doc[1]["grasp"]["joints"] = {0.1, 0.2};
        CHECK_THROWS_AS(kb_load(rewrite(doc)), DomainError);
    }
    SUBCASE("malformed records") {
        auto doc = manifest;
        doc[0].erase("grasp");
        CHECK_THROWS_AS(kb_load(rewrite(doc)), IoError);
        CHECK_THROWS_AS(kb_load(rewrite(nlohmann::json::object())), IoError);
        CHECK_THROWS_AS(kb_load(dir / "absent.json"), IoError);
        doc = manifest;
        doc[0]["category"] = "pinch";
        CHECK_THROWS_AS(kb_load(rewrite(doc)), DomainError);
        doc = manifest;
        doc[1]["id"] = doc[0]["id"];
        CHECK_THROWS_AS(kb_load(rewrite(doc)), DomainError);
    }
}
