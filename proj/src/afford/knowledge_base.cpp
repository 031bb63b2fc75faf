// SPDX-License-Identifier: Apache-2.0

#include "voxforge/afford/knowledge_base.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "voxforge/afford/chamfer.hpp"
#include "voxforge/error.hpp"
#include "voxforge/voxel/io.hpp"

namespace voxforge::afford {

using nlohmann::json;

std::string_view to_string(Category c) {
    switch (c) {
        case Category::handle_grasp: return "handle_grasp";
        case Category::wrap_grasp: return "wrap_grasp";
        case Category::lift: return "lift";
        case Category::press: return "press";
    }
    return "unknown";
}

Category parse_category(std::string_view s) {
    for (Category c : kCategories)
        if (to_string(c) == s) return c;
    throw DomainError("unknown category '" + std::string(s) +
                      "' (expected handle_grasp, wrap_grasp, lift or press)");
}

void GraspStrategy::validate() const {
    if (!is_finite(grasp_point)) throw DomainError("grasp point is not finite");
    for (double a : joint_angles)
        if (!std::isfinite(a)) throw DomainError("joint angle is not finite");
    const double n = norm(wrist_orientation);
    if (!(std::abs(n - 1.0) <= 1e-9)) throw DomainError("wrist quaternion norm " + std::to_string(n) + " is not 1");
}

namespace {

bool safe_id(const std::string& id) {
    if (id.empty() || id.front() == '.') return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    });
}

}  // namespace

KnowledgeBase::KnowledgeBase(std::vector<KnowledgeEntry> entries) : entries_(std::move(entries)) {
    std::set<std::string> seen;
    for (const auto& e : entries_) {
        if (!safe_id(e.id)) throw DomainError("invalid knowledge entry id '" + e.id + "'");
        if (!seen.insert(e.id).second) throw DomainError("duplicate knowledge entry id '" + e.id + "'");
        if (e.cloud.empty()) throw DomainError("knowledge entry '" + e.id + "' has an empty cloud");
        try {
            e.strategy.validate();
        } catch (const DomainError& err) {
            throw DomainError("knowledge entry '" + e.id + "': " + err.what());
        }
        trees_.push_back(std::make_shared<const KdTree>(e.cloud));
    }
}

std::vector<std::size_t> KnowledgeBase::in_category(Category c) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < entries_.size(); ++i)
        if (entries_[i].category == c) out.push_back(i);
    std::sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) { return entries_[a].id < entries_[b].id; });
    return out;
}

Retrieval retrieve(const voxel::PointCloud& recon, Category category, const KnowledgeBase& kb) {
    if (recon.empty()) throw DomainError("retrieve: empty query cloud");
    const auto candidates = kb.in_category(category);
    if (candidates.empty())
        throw DomainError("knowledge base has no entries in category " + std::string(to_string(category)));
    const voxel::PointCloud query = recon.translated(-recon.centroid());
    const KdTree query_tree(query);
    Retrieval best{candidates.front(), std::numeric_limits<double>::infinity()};
    // Candidates are in id order, so a strict comparison keeps the smaller id on ties.
    for (std::size_t i : candidates) {
        const double d = chamfer(query, query_tree, kb.entries()[i].cloud, kb.tree(i));
        if (d < best.distance) best = {i, d};
    }
    return best;
}

GraspStrategy transfer_strategy(const KnowledgeEntry& entry, const voxel::PointCloud& recon) {
    if (recon.empty() || entry.cloud.empty()) throw DomainError("transfer_strategy: empty cloud");
    const auto [elo, ehi] = entry.cloud.bounds();
    const auto [rlo, rhi] = recon.bounds();
    const Vec3 es = ehi - elo;
    const Vec3 rs = rhi - rlo;
    GraspStrategy out = entry.strategy;
    const Vec3 ec = entry.cloud.centroid();
    const Vec3 rc = recon.centroid();
    for (int a = 0; a < 3; ++a) {
        if (!(es[a] > 0.0) || !(rs[a] > 0.0))
            throw DomainError("transfer_strategy: bounding box has zero extent on an axis");
        out.grasp_point[a] = rc[a] + (entry.strategy.grasp_point[a] - ec[a]) * (rs[a] / es[a]);
    }
    return out;
}

namespace {

template <typename T>
T field(const json& j, const char* key, const std::string& who) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw IoError("knowledge entry " + who + ": missing or malformed '" + key + "'");
    }
}

KnowledgeEntry parse_entry(const json& j, const std::filesystem::path& base, std::size_t position) {
    if (!j.is_object()) throw IoError("knowledge entry #" + std::to_string(position) + " is not an object");
    const std::string who = j.contains("id") && j["id"].is_string() ? "'" + j["id"].get<std::string>() + "'"
                                                                     : "#" + std::to_string(position);
    for (const auto& [key, _] : j.items())
        if (key != "id" && key != "category" && key != "cloud" && key != "grasp")
            throw IoError("knowledge entry " + who + ": unknown key '" + key + "'");
    KnowledgeEntry e;
    e.id = field<std::string>(j, "id", who);
    e.category = parse_category(field<std::string>(j, "category", who));
    const auto grasp = field<json>(j, "grasp", who);
    const auto point = field<std::array<double, 3>>(grasp, "point", who);
    const auto quat = field<std::array<double, 4>>(grasp, "quat", who);
    const auto joints = field<std::vector<double>>(grasp, "joints", who);
    if (joints.size() != kJointCount)
        throw DomainError("knowledge entry " + who + ": expected 8 joint angles, got " + std::to_string(joints.size()));
    e.strategy.grasp_point = {point[0], point[1], point[2]};
    e.strategy.wrist_orientation = {quat[0], quat[1], quat[2], quat[3]};
    std::copy(joints.begin(), joints.end(), e.strategy.joint_angles.begin());
    const auto cloud_path = base / field<std::string>(j, "cloud", who);
    try {
        e.cloud = voxel::load_ply(cloud_path);
    } catch (const IoError& err) {
        throw IoError("knowledge entry " + who + ": " + err.what());
    }
    return e;
}

}  // namespace

KnowledgeBase kb_load(const std::filesystem::path& manifest) {
    std::ifstream in(manifest);
    if (!in) throw IoError("cannot open knowledge base manifest " + manifest.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw IoError(manifest.string() + ": " + e.what());
    }
    if (!doc.is_array()) throw IoError(manifest.string() + ": manifest must be a JSON array");
    std::vector<KnowledgeEntry> entries;
    for (std::size_t i = 0; i < doc.size(); ++i) entries.push_back(parse_entry(doc[i], manifest.parent_path(), i));
    return KnowledgeBase(std::move(entries));
}

void kb_save(const KnowledgeBase& kb, const std::filesystem::path& manifest) {
    const auto base = manifest.parent_path();
    std::error_code ec;
    std::filesystem::create_directories(base / "clouds", ec);
    if (ec) throw IoError("cannot create " + (base / "clouds").string() + ": " + ec.message());
    json doc = json::array();
    for (const auto& e : kb.entries()) {
        const std::string rel = "clouds/" + e.id + ".ply";
        voxel::save_ply(base / rel, e.cloud);
        const auto& s = e.strategy;
        const auto& q = s.wrist_orientation;
        doc.push_back({{"id", e.id},
                       {"category", to_string(e.category)},
                       {"cloud", rel},
                       {"grasp",
                        {{"point", {s.grasp_point.x, s.grasp_point.y, s.grasp_point.z}},
                         {"quat", {q.w, q.x, q.y, q.z}},
                         {"joints", s.joint_angles}}}});
    }
    std::ofstream out(manifest);
    if (!out) throw IoError("cannot write " + manifest.string());
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("failed writing " + manifest.string());
}

}  // namespace voxforge::afford
