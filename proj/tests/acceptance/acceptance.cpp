// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one PASS/FAIL line per criterion. Optional arguments
// select criteria by number, e.g. `acceptance 1 3 6`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "voxforge/afford/chamfer.hpp"
#include "voxforge/afford/toy_kb.hpp"
#include "voxforge/autodiff/ops.hpp"
#include "voxforge/grasp/refine.hpp"
#include "voxforge/rgan/dataset.hpp"
#include "voxforge/util/random.hpp"
#include "voxforge/voxel/metrics.hpp"

using namespace voxforge;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass{false};
    std::string detail;
};

std::string num(double v, const char* f = "%.6g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// Metric identities against a per-voxel triple loop.
Outcome metric_identities() {
    util::Rng rng(101);
    const voxel::Frame frame = voxel::cube_frame(16, {}, 1.0);
    int identity_fail = 0, oracle_fail = 0, pairs = 0;
    for (int trial = 0; trial < 200; ++trial) {
        voxel::VoxelGrid recon(frame), truth(frame);
        const double pr = util::unit_uniform(rng), pt = util::unit_uniform(rng);
        for (std::size_t n = 0; n < recon.size(); ++n) {
            recon.set(n, util::unit_uniform(rng) < pr);
            truth.set(n, util::unit_uniform(rng) < pt);
        }
        truth.set(static_cast<std::size_t>(trial), true);  // keep the union nonempty
        std::size_t inter = 0, uni = 0, fn = 0, fp = 0;
        for (int z = 0; z < 16; ++z)
            for (int y = 0; y < 16; ++y)
                for (int x = 0; x < 16; ++x) {
                    const bool r = recon.test(voxel::Index3{x, y, z});
                    const bool t = truth.test(voxel::Index3{x, y, z});
                    inter += r && t;
                    uni += r || t;
                    fn += t && !r;
                    fp += r && !t;
                }
        const auto m = voxel::evaluate(recon, truth);
        const auto& c = m.counts;
        identity_fail += c.intersection + c.false_negative + c.false_positive != c.union_;
        const double u = static_cast<double>(uni);
        const bool same = c.intersection == inter && c.union_ == uni && c.false_negative == fn &&
                          c.false_positive == fp && m.iou == static_cast<double>(inter) / u &&
                          m.hit_rate == 1.0 - static_cast<double>(fn) / u &&
                          m.accuracy == 1.0 - static_cast<double>(fp) / u;
        oracle_fail += !same;
        ++pairs;
    }
    return {identity_fail == 0 && oracle_fail == 0,
            std::to_string(pairs) + " pairs at 16^3, identity failures " + std::to_string(identity_fail) +
                ", oracle mismatches " + std::to_string(oracle_fail)};
}

// Central differences on a random weighted sum of the primitive's output.
double max_gradient_error(const std::vector<ad::Tensor>& leaves,
                          const std::function<ad::Tensor(const std::vector<ad::Tensor>&)>& f, util::Rng& rng) {
    const auto probe = f(leaves);
    std::vector<double> wv(probe.numel());
    for (auto& w : wv) w = util::uniform(rng, -1.0, 1.0);
    const ad::Tensor weights = ad::Tensor::from(probe.shape(), wv);
    const auto loss = [&] { return ad::sum(ad::mul(f(leaves), weights)); };
    for (auto leaf : leaves) leaf.zero_grad();
    ad::backward(loss());
    const double h = 1e-5;
    double worst = 0.0;
    for (auto leaf : leaves) {
        const std::vector<double> analytic(leaf.grad().begin(), leaf.grad().end());
        for (std::size_t i = 0; i < leaf.numel(); ++i) {
            const double x0 = leaf.data()[i];
            leaf.mutable_data()[i] = x0 + h;
            const double up = loss().item();
            leaf.mutable_data()[i] = x0 - h;
            const double down = loss().item();
            leaf.mutable_data()[i] = x0;
            const double numeric = (up - down) / (2 * h);
            const double rel =
                std::abs(analytic[i] - numeric) / std::max({std::abs(analytic[i]), std::abs(numeric), 1e-6});
            worst = std::max(worst, rel);
        }
    }
    return worst;
}

Outcome autodiff_soundness() {
    util::Rng rng(202);
    const auto tensor = [&](ad::Shape s, double lo = -1.0, double hi = 1.0) {
        std::vector<double> v(ad::shape_numel(s));
        for (auto& x : v) x = util::uniform(rng, lo, hi);
        return ad::Tensor::from(std::move(s), std::move(v), true);
    };
    const auto pick = [&](int lo, int hi) { return lo + static_cast<int>(util::uniform_index(rng, hi - lo + 1)); };
    // Entries bounded away from zero, for the relu kink.
    const auto off_zero = [&](ad::Shape s) {
        std::vector<double> v(ad::shape_numel(s));
        for (auto& x : v) x = util::uniform(rng, 0.05, 1.0) * (util::unit_uniform(rng) < 0.5 ? -1.0 : 1.0);
        return ad::Tensor::from(std::move(s), std::move(v), true);
    };

    struct Primitive {
        std::string name;
        std::function<double()> instance;
    };
    const std::vector<Primitive> prims = {
        {"conv3d",
         [&] {
             const std::size_t ci = pick(1, 3), co = pick(1, 3);
             const int e = pick(3, 6), k = pick(1, 4), s = pick(1, 2), p = pick(0, 1);
             return max_gradient_error(
                 {tensor({1, ci, static_cast<std::size_t>(e), static_cast<std::size_t>(e), static_cast<std::size_t>(e)}),
                  tensor({co, ci, static_cast<std::size_t>(k), static_cast<std::size_t>(k), static_cast<std::size_t>(k)}),
                  tensor({co})},
                 [=](const auto& v) { return ad::conv3d(v[0], v[1], v[2], s, p); }, rng);
         }},
        {"conv3d_transpose",
         [&] {
             const std::size_t ci = pick(1, 3), co = pick(1, 3);
             const int e = pick(2, 4), k = pick(2, 4), s = pick(1, 2), p = pick(0, 1);
             return max_gradient_error(
                 {tensor({1, ci, static_cast<std::size_t>(e), static_cast<std::size_t>(e), static_cast<std::size_t>(e)}),
                  tensor({ci, co, static_cast<std::size_t>(k), static_cast<std::size_t>(k), static_cast<std::size_t>(k)}),
                  tensor({co})},
                 [=](const auto& v) { return ad::conv3d_transpose(v[0], v[1], v[2], s, p); }, rng);
         }},
        {"linear",
         [&] {
             const std::size_t n = pick(1, 4), in = pick(1, 8), out = pick(1, 8);
             return max_gradient_error({tensor({n, in}), tensor({out, in}), tensor({out})},
                                       [](const auto& v) { return ad::linear(v[0], v[1], v[2]); }, rng);
         }},
        {"lstm_cell",
         [&] {
             const std::size_t n = pick(1, 3), in = pick(1, 4), hid = pick(1, 4);
             std::vector<ad::Tensor> leaves = {tensor({n, in}), tensor({n, hid}), tensor({n, hid})};
             for (int g = 0; g < 4; ++g) leaves.push_back(tensor({hid, in + hid}));
             for (int g = 0; g < 4; ++g) leaves.push_back(tensor({hid}));
             return max_gradient_error(leaves, [](const auto& v) {
                 const ad::LstmParams q{v[3], v[4], v[5], v[6], v[7], v[8], v[9], v[10]};
                 const auto out = ad::lstm_cell(v[0], {v[1], v[2]}, q);
                 return ad::concat_cols({out.h, out.s});
             }, rng);
         }},
        {"relu",
         [&] {
             return max_gradient_error({off_zero({static_cast<std::size_t>(pick(1, 24))})},
                                       [](const auto& v) { return ad::relu(v[0]); }, rng);
         }},
        {"sigmoid",
         [&] {
             return max_gradient_error({tensor({static_cast<std::size_t>(pick(1, 24))}, -4.0, 4.0)},
                                       [](const auto& v) { return ad::sigmoid(v[0]); }, rng);
         }},
        {"tanh",
         [&] {
             return max_gradient_error({tensor({static_cast<std::size_t>(pick(1, 24))}, -3.0, 3.0)},
                                       [](const auto& v) { return ad::tanh(v[0]); }, rng);
         }},
        {"bce",
         [&] {
             const std::size_t n = pick(1, 24);
             std::vector<double> t(n);
             for (auto& x : t) x = util::unit_uniform(rng) < 0.4 ? 1.0 : 0.0;
             const auto target = ad::Tensor::from({n}, t);
             const double pw = util::uniform(rng, 1.0, 5.0);
             return max_gradient_error({tensor({n}, 0.02, 0.98)},
                                       [=](const auto& v) { return ad::bce_loss(v[0], target, pw); }, rng);
         }},
    };
    const int instances = 20;
    bool ok = true;
    std::string detail = std::to_string(instances) + " instances each, max rel error:";
    for (const auto& p : prims) {
        double worst = 0.0;
        for (int i = 0; i < instances; ++i) worst = std::max(worst, p.instance());
        ok = ok && worst < 1e-4;
        detail += " " + p.name + " " + num(worst, "%.2e");
    }
    return {ok, detail};
}

voxel::PointCloud random_cloud(util::Rng& rng, std::size_t n, double spread) {
    std::vector<Vec3> pts(n);
    for (auto& p : pts) p = {util::uniform(rng, -spread, spread), util::uniform(rng, -spread, spread),
                             util::uniform(rng, -spread, spread)};
    return voxel::PointCloud(std::move(pts));
}

Outcome chamfer_correctness() {
    util::Rng rng(303);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const auto a = random_cloud(rng, 1 + util::uniform_index(rng, 1000), util::uniform(rng, 0.01, 2.0));
        auto b = random_cloud(rng, 1 + util::uniform_index(rng, 1000), util::uniform(rng, 0.01, 2.0));
        if (i % 10 == 0) b = a;  // exercise exact zero distances too
        const double fast = afford::chamfer(a, b);
        const double slow = afford::reference::chamfer(a, b);
        const double rel = slow == 0.0 ? std::abs(fast) : std::abs(fast - slow) / slow;
        worst = std::max(worst, rel);
    }
    const double hand =
        afford::chamfer(voxel::PointCloud({{0.0, 0.0, 0.0}}), voxel::PointCloud({{1.0, 0.0, 0.0}}));
    return {worst < 1e-9 && hand == 2.0,
            "100 pairs, max rel error " + num(worst, "%.2e") + ", hand case " + num(hand, "%.17g")};
}

rgan::ScanOptions scan16() {
    rgan::ScanOptions so;
    so.grid_dim = 16;
    so.views = 3;
    return so;
}

rgan::RganConfig overfit_config() {
    rgan::RganConfig cfg;
    cfg.grid_dim = 16;
    cfg.epochs = 500;
    cfg.seed = 0;
    cfg.max_views = 3;
    return cfg;
}

// Trained once and shared with the multi-view check.
std::optional<rgan::TrainResult> g_overfit;

std::string log_text(const std::vector<rgan::EpochLog>& log) {
    std::ostringstream out;
    rgan::write_training_log(out, log);
    return out.str();
}

Outcome overfit_reconstruction() {
    const auto shapes = scan::shapes::toy_set();
    const auto data = rgan::make_dataset(shapes, scan16());
    rgan::TrainOptions opts;
    opts.stop_at_iou = 0.9;
    auto first = rgan::train(data, overfit_config(), opts);
    const auto second = rgan::train(data, overfit_config(), opts);
    const double iou = first.log.back().mean_train_iou;
    const bool same = log_text(first.log) == log_text(second.log) &&
                      rgan::mean_iou(data, first.gen) == rgan::mean_iou(data, second.gen);
    const auto epochs = first.log.size();
    g_overfit = std::move(first);
    return {iou >= 0.9 && same,
            "mean training IoU " + num(iou, "%.4f") + " after " + std::to_string(epochs) + " epochs, rerun " +
                (same ? "identical" : "DIFFERS")};
}

Outcome multi_view_benefit() {
    if (!g_overfit) overfit_reconstruction();
    const auto shapes = scan::shapes::perturbed_toy_set(17);
    const auto held_out = rgan::make_dataset(shapes, scan16());
    double one = 0.0, three = 0.0;
    for (const auto& s : held_out) {
        const rgan::ViewSequence first{{s.views.views.front()}};
        one += voxel::iou(rgan::reconstruct(first, g_overfit->gen), s.truth);
        three += voxel::iou(rgan::reconstruct(s.views, g_overfit->gen), s.truth);
    }
    one /= static_cast<double>(held_out.size());
    three /= static_cast<double>(held_out.size());
    return {three >= one - 0.02, std::to_string(held_out.size()) + " held-out shapes, mean IoU 1 view " +
                                     num(one, "%.4f") + ", 3 views " + num(three, "%.4f")};
}

Outcome retrieval_oracle() {
    const auto kb = afford::toy_knowledge_base();
    util::Rng rng(606);
    int mismatches = 0, crossings = 0;
    for (int q = 0; q < 50; ++q) {
        const auto category = afford::kCategories[util::uniform_index(rng, 4)];
        // A distorted copy of a random entry, from any category.
        const auto& src = kb.entries()[util::uniform_index(rng, kb.size())];
        const double scale = util::uniform(rng, 0.8, 1.25);
        const Vec3 shift{util::uniform(rng, -1, 1), util::uniform(rng, -1, 1), util::uniform(rng, -1, 1)};
        std::vector<Vec3> pts;
        const std::size_t keep = 50 + util::uniform_index(rng, src.cloud.size() - 50);
        for (std::size_t i = 0; i < keep; ++i) {
            const Vec3& p = src.cloud[util::uniform_index(rng, src.cloud.size())];
            const Vec3 jitter{util::uniform(rng, -2e-3, 2e-3), util::uniform(rng, -2e-3, 2e-3),
                              util::uniform(rng, -2e-3, 2e-3)};
            pts.push_back(scale * p + shift + jitter);
        }
        const voxel::PointCloud query(std::move(pts));
        const auto got = afford::retrieve(query, category, kb);

        const auto centered = query.translated(-query.centroid());
        std::size_t best = kb.size();
        double best_d = 0.0;
        for (std::size_t i = 0; i < kb.size(); ++i) {
            const auto& e = kb.entries()[i];
            if (e.category != category) continue;
            const double d = afford::reference::chamfer(centered, e.cloud);
            if (best == kb.size() || d < best_d || (d == best_d && e.id < kb.entries()[best].id)) {
                best = i;
                best_d = d;
            }
        }
        crossings += kb.entries()[got.index].category != category;
        mismatches += got.index != best || std::abs(got.distance - best_d) > 1e-9 * best_d;
    }
    return {mismatches == 0 && crossings == 0, "50 queries over a " + std::to_string(kb.size()) +
                                                   "-entry base, mismatches " + std::to_string(mismatches) +
                                                   ", category crossings " + std::to_string(crossings)};
}

Outcome ppo_refinement() {
    const auto env = grasp::cube_environment();
    grasp::PpoConfig cfg;
    cfg.episodes = 1000;
    cfg.eval_episodes = 100;
    const auto r = grasp::refine_grasp(env, cfg);
    return {r.eval_success_rate >= 0.8, std::to_string(r.episodes) + " training episodes (success " +
                                            num(r.train_success_rate, "%.3f") + "), " +
                                            std::to_string(cfg.eval_episodes) + " evaluation episodes, success " +
                                            num(r.eval_success_rate, "%.3f")};
}

bool same_bytes(const fs::path& a, const fs::path& b) {
    std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
    if (!fa || !fb) return false;
    return std::string(std::istreambuf_iterator<char>(fa), {}) == std::string(std::istreambuf_iterator<char>(fb), {});
}

Outcome end_to_end_pipeline() {
    const fs::path work = fs::temp_directory_path() / "voxforge_acceptance_pipeline";
    fs::remove_all(work);
    const fs::path config = fs::path(VOXFORGE_DATA_DIR) / "pipeline.json";
    int codes[2];
    for (int run = 0; run < 2; ++run) {
        const std::string cmd = std::string("\"") + VOXFORGE_CLI + "\" pipeline -c \"" + config.string() +
                                "\" -o \"" + (work / ("run" + std::to_string(run))).string() + "\" 2>/dev/null";
        codes[run] = std::system(cmd.c_str());
    }
    if (codes[0] != 0 || codes[1] != 0)
        return {false, "exit status " + std::to_string(codes[0]) + " / " + std::to_string(codes[1])};

    const fs::path a = work / "run0", b = work / "run1";
    const auto manifest = nlohmann::json::parse(std::ifstream(a / "manifest.json"));
    std::size_t missing = 0, depth = 0;
    for (const auto& rel : manifest.at("artifacts")) {
        const fs::path p = a / rel.get<std::string>();
        missing += !fs::exists(p);
        depth += p.extension() == ".dpt";
    }
    bool radius_ok = true;
    for (const auto& cam : nlohmann::json::parse(std::ifstream(a / "render" / "cameras.json"))) {
        double d2 = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double d = cam["position"][i].get<double>() - cam["look_at"][i].get<double>();
            d2 += d * d;
        }
        radius_ok = radius_ok && std::abs(std::sqrt(d2) - 1.6) < 1e-9;
    }
    std::size_t compared = 0, differing = 0;
    for (const auto& entry : fs::recursive_directory_iterator(a)) {
        const auto ext = entry.path().extension();
        if (ext != ".csv" && ext != ".json") continue;
        ++compared;
        differing += !same_bytes(entry.path(), b / fs::relative(entry.path(), a));
    }
    const std::set<std::string> required = {"evaluation.csv", "training_log.csv", "refine.csv", "retrieval.json",
                                            "recon.vxg", "model/rgan.json"};
    std::size_t absent = 0;
    for (const auto& r : required) absent += !fs::exists(a / r);
    fs::remove_all(work);
    return {missing == 0 && absent == 0 && depth == 125 && radius_ok && differing == 0 && compared > 0,
            std::to_string(depth) + " depth scans at 1.6 m, " + std::to_string(manifest.at("artifacts").size()) +
                " artifacts, IoU " + num(manifest.at("iou").get<double>(), "%.4f") + ", refine success " +
                num(manifest.at("eval_success_rate").get<double>(), "%.2f") + "; rerun: " +
                std::to_string(differing) + " of " + std::to_string(compared) + " CSV/JSON files differ"};
}

struct Criterion {
    int id;
    const char* name;
    double limit_seconds;  // 0 when no runtime bound applies
    Outcome (*run)();
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "metric identities", 5.0, metric_identities},
        {2, "autodiff soundness", 60.0, autodiff_soundness},
        {3, "chamfer correctness", 10.0, chamfer_correctness},
        {4, "overfit reconstruction", 30 * 60.0, overfit_reconstruction},
        {5, "multi-view benefit", 0.0, multi_view_benefit},
        {6, "retrieval oracle", 5.0, retrieval_oracle},
        {7, "PPO refinement", 10 * 60.0, ppo_refinement},
        {8, "end-to-end pipeline", 0.0, end_to_end_pipeline},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

    int failed = 0;
    for (const auto& c : criteria) {
        if (!wanted.empty() && !wanted.contains(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = c.limit_seconds == 0.0 || secs < c.limit_seconds;
        const bool pass = o.pass && in_time;
        failed += !pass;
        std::cout << (pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << o.detail << " ("
                  << num(secs, "%.1f") << " s" << (c.limit_seconds > 0 ? ", limit " + num(c.limit_seconds, "%g") + " s" : "")
                  << (in_time ? "" : ", OVER TIME") << ")" << std::endl;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
