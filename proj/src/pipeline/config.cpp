// SPDX-License-Identifier: Apache-2.0

#include "voxforge/pipeline/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <set>
#include <string>

#include "voxforge/error.hpp"
#include "voxforge/pipeline/json_io.hpp"
#include "voxforge/rgan/config_io.hpp"

namespace voxforge::pipeline {

using nlohmann::json;

void PipelineConfig::set_seed(std::uint64_t s) {
    seed = s;
    train.seed = s;
    refine.seed = s;
}

namespace {

const json& section(const json& j, const char* name) {
    static const json empty = json::object();
    if (!j.contains(name)) return empty;
    const json& s = j.at(name);
    if (!s.is_object()) throw UsageError(std::string("config section '") + name + "' must be an object");
    return s;
}

void only_keys(const json& j, const char* where, std::initializer_list<const char*> keys) {
    const std::set<std::string> known(keys.begin(), keys.end());
    for (const auto& [key, _] : j.items())
        if (!known.contains(key)) throw UsageError(std::string("unknown key '") + key + "' in config " + where);
}

template <typename T>
void read(const json& j, const char* where, const char* key, T& into) {
    if (!j.contains(key)) return;
    try {
        into = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw UsageError(std::string("config ") + where + "." + key + " has the wrong type");
    }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

}  // namespace

PipelineConfig pipeline_config_from_json(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw UsageError("pipeline config must be a JSON object");
    only_keys(j, "root", {"scan", "grid", "train", "retrieve", "refine", "io"});
    PipelineConfig c;

    const json& scan = section(j, "scan");
    only_keys(scan, "scan", {"views", "radius", "image_size", "fov", "train_views"});
    read(scan, "scan", "views", c.scan.views);
    read(scan, "scan", "radius", c.scan.radius);
    read(scan, "scan", "image_size", c.scan.image_size);
    read(scan, "scan", "fov", c.scan.fov);
    read(scan, "scan", "train_views", c.scan.train_views);
    if (c.scan.views < 1 || c.scan.train_views == 0 || c.scan.train_views > static_cast<std::size_t>(c.scan.views))
        throw UsageError("config scan: need 1 <= train_views <= views");

    const json& grid = section(j, "grid");
    only_keys(grid, "grid", {"m"});
    int m = 16;
    read(grid, "grid", "m", m);

    json train = section(j, "train");
    if (train.contains("grid_dim") && train["grid_dim"] != m)
        throw UsageError("config train.grid_dim disagrees with grid.m");
    train["grid_dim"] = m;
    if (!train.contains("max_views")) train["max_views"] = std::max(c.scan.train_views, c.train.max_views);
    try {
        c.train = rgan::config_from_json(train);
        c.refine = ppo_config_from_json(section(j, "refine"));
    } catch (const DomainError& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
    if (c.train.max_views < c.scan.train_views)
        throw UsageError("config train.max_views is smaller than scan.train_views");

    const json& ret = section(j, "retrieve");
    only_keys(ret, "retrieve", {"kb_path", "category"});
    if (ret.contains("kb_path") && !ret["kb_path"].is_null()) {
        std::string p;
        read(ret, "retrieve", "kb_path", p);
        c.kb_path = resolve(base_dir, p);
    }
    std::string category(afford::to_string(c.category));
    read(ret, "retrieve", "category", category);
    try {
        c.category = afford::parse_category(category);
    } catch (const DomainError& e) {
        throw UsageError(std::string("config retrieve.category: ") + e.what());
    }

    const json& io = section(j, "io");
    only_keys(io, "io", {"mesh", "out_dir", "seed"});
    std::string mesh, out = "out";
    read(io, "io", "mesh", mesh);
    read(io, "io", "out_dir", out);
    if (mesh.empty()) throw UsageError("config io.mesh is required");
    c.mesh = resolve(base_dir, mesh);
    c.out_dir = resolve(base_dir, out);
    if (io.contains("seed")) {
        std::uint64_t seed = 0;
        read(io, "io", "seed", seed);
        c.set_seed(seed);
    } else {
        c.seed = c.train.seed;
    }
    return c;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    return pipeline_config_from_json(load_json(path), path.parent_path());
}

std::optional<std::uint64_t> seed_from_env() {
    const char* v = std::getenv("VOXFORGE_SEED");
    if (v == nullptr) return std::nullopt;
    std::uint64_t seed = 0;
    const char* end = v + std::strlen(v);
    const auto [ptr, ec] = std::from_chars(v, end, seed);
    if (ec != std::errc{} || ptr != end || ptr == v)
        throw UsageError(std::string("VOXFORGE_SEED must be a non-negative integer, got '") + v + "'");
    return seed;
}

}  // namespace voxforge::pipeline
