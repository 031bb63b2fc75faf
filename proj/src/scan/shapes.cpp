// SPDX-License-Identifier: Apache-2.0

#include "voxforge/scan/shapes.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace voxforge::scan::shapes {

namespace {

constexpr double kPi = std::numbers::pi;

using Tris = std::vector<Triangle>;

void quad(Tris& t, std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) {
    t.push_back({a, b, c});
    t.push_back({a, c, d});
}

// Extrudes a simple polygon in the x-z plane along y over [-depth/2, depth/2].
// `fan` triangulates the polygon as index triples into `poly`.
TriangleMesh extrude_xz(const std::vector<std::pair<double, double>>& poly, const Tris& fan, double depth) {
    std::vector<Vec3> v;
    Tris t;
    const auto n = static_cast<std::uint32_t>(poly.size());
    for (const auto& [x, z] : poly) v.push_back({x, -depth / 2, z});
    for (const auto& [x, z] : poly) v.push_back({x, depth / 2, z});
    for (const auto& f : fan) {
        t.push_back({f[0], f[2], f[1]});
        t.push_back({f[0] + n, f[1] + n, f[2] + n});
    }
    for (std::uint32_t i = 0; i < n; ++i) {
        const std::uint32_t j = (i + 1) % n;
        quad(t, i, j, j + n, i + n);
    }
    return TriangleMesh(std::move(v), std::move(t));
}

}  // namespace

TriangleMesh box(const Vec3& h) {
    std::vector<Vec3> v;
    for (int i = 0; i < 8; ++i) {
        v.push_back({(i & 1) ? h.x : -h.x, (i & 2) ? h.y : -h.y, (i & 4) ? h.z : -h.z});
    }
    Tris t;
    quad(t, 0, 2, 3, 1);  // z-
    quad(t, 4, 5, 7, 6);  // z+
    quad(t, 0, 1, 5, 4);  // y-
    quad(t, 2, 6, 7, 3);  // y+
    quad(t, 0, 4, 6, 2);  // x-
    quad(t, 1, 3, 7, 5);  // x+
    return TriangleMesh(std::move(v), std::move(t));
}

TriangleMesh cube(double edge) { return box({edge / 2, edge / 2, edge / 2}); }

TriangleMesh uv_sphere(double r, int slices, int stacks) {
    std::vector<Vec3> v;
    Tris t;
    v.push_back({0, 0, r});
    for (int i = 1; i < stacks; ++i) {
        const double phi = kPi * i / stacks;
        for (int j = 0; j < slices; ++j) {
            const double th = 2 * kPi * j / slices;
            v.push_back({r * std::sin(phi) * std::cos(th), r * std::sin(phi) * std::sin(th), r * std::cos(phi)});
        }
    }
    v.push_back({0, 0, -r});
    const auto s = static_cast<std::uint32_t>(slices);
    const auto bottom = static_cast<std::uint32_t>(v.size() - 1);
    auto ring = [s](int i, std::uint32_t j) { return 1 + static_cast<std::uint32_t>(i) * s + j % s; };
    for (std::uint32_t j = 0; j < s; ++j) {
        t.push_back({0, ring(0, j), ring(0, j + 1)});
        t.push_back({bottom, ring(stacks - 2, j + 1), ring(stacks - 2, j)});
    }
    for (int i = 0; i + 1 < stacks - 1; ++i) {
        for (std::uint32_t j = 0; j < s; ++j) quad(t, ring(i, j), ring(i + 1, j), ring(i + 1, j + 1), ring(i, j + 1));
    }
    return TriangleMesh(std::move(v), std::move(t));
}

TriangleMesh cylinder(double r, double height, int slices) {
    std::vector<Vec3> v;
    Tris t;
    const auto s = static_cast<std::uint32_t>(slices);
    for (std::uint32_t j = 0; j < s; ++j) {
        const double th = 2 * kPi * j / slices;
        v.push_back({r * std::cos(th), r * std::sin(th), -height / 2});
    }
    for (std::uint32_t j = 0; j < s; ++j) {
        const double th = 2 * kPi * j / slices;
        v.push_back({r * std::cos(th), r * std::sin(th), height / 2});
    }
    v.push_back({0, 0, -height / 2});
    v.push_back({0, 0, height / 2});
    const std::uint32_t cb = 2 * s;
    const std::uint32_t ct = 2 * s + 1;
    for (std::uint32_t j = 0; j < s; ++j) {
        const std::uint32_t k = (j + 1) % s;
        quad(t, j, k, k + s, j + s);
        t.push_back({cb, k, j});
        t.push_back({ct, j + s, k + s});
    }
    return TriangleMesh(std::move(v), std::move(t));
}

TriangleMesh torus(double major, double minor, int nu, int nv) {
    std::vector<Vec3> v;
    Tris t;
    for (int i = 0; i < nu; ++i) {
        const double u = 2 * kPi * i / nu;
        for (int j = 0; j < nv; ++j) {
            const double w = 2 * kPi * j / nv;
            const double rr = major + minor * std::cos(w);
            v.push_back({rr * std::cos(u), rr * std::sin(u), minor * std::sin(w)});
        }
    }
    auto id = [nu, nv](int i, int j) { return static_cast<std::uint32_t>(((i % nu) * nv) + (j % nv)); };
    for (int i = 0; i < nu; ++i) {
        for (int j = 0; j < nv; ++j) quad(t, id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
    }
    return TriangleMesh(std::move(v), std::move(t));
}

TriangleMesh l_bracket(double size, double thickness, double depth) {
    const double a = size / 2;
    const double lo = -a;
    const double k = -a + thickness;
    // L outline in x-z, counter-clockwise; fanned from the reflex corner (index 3).
    const std::vector<std::pair<double, double>> poly = {{lo, lo}, {a, lo}, {a, k}, {k, k}, {k, a}, {lo, a}};
    const Tris fan = {{3, 4, 5}, {3, 5, 0}, {3, 0, 1}, {3, 1, 2}};
    return extrude_xz(poly, fan, depth);
}

std::vector<NamedMesh> toy_set(double scale) {
    const double k = scale / 0.2;
    return {
        {"cube", cube(0.16 * k)},
        {"sphere", uv_sphere(0.09 * k)},
        {"cylinder", cylinder(0.06 * k, 0.18 * k)},
        {"l_bracket", l_bracket(0.18 * k, 0.06 * k, 0.12 * k)},
        {"torus", torus(0.065 * k, 0.03 * k)},
    };
}

std::vector<NamedMesh> perturbed_toy_set(unsigned seed, double scale) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(0.85, 1.15);
    auto axis_scale = [&] { return Vec3{jitter(rng), jitter(rng), jitter(rng)}; };
    const double k = scale / 0.2;
    std::vector<NamedMesh> out;
    out.push_back({"cube", cube(0.16 * k).transformed(axis_scale(), {})});
    out.push_back({"sphere", uv_sphere(0.09 * k).transformed(axis_scale(), {})});
    out.push_back({"cylinder", cylinder(0.06 * k * jitter(rng), 0.18 * k * jitter(rng))});
    out.push_back({"l_bracket", l_bracket(0.18 * k * jitter(rng), 0.06 * k * jitter(rng), 0.12 * k * jitter(rng))});
    out.push_back({"torus", torus(0.065 * k * jitter(rng), 0.03 * k * jitter(rng))});
    for (auto& nm : out) nm.name += "_perturbed";
    return out;
}

}  // namespace voxforge::scan::shapes
