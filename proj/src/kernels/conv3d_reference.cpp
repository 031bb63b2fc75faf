// SPDX-License-Identifier: Apache-2.0

#include <algorithm>

#include "voxforge/kernels/conv3d.hpp"

namespace voxforge::kernels::reference {

namespace {

struct Indexer {
    const ConvGeometry& g;
    std::size_t x(std::size_t n, std::size_t c, int z, int y, int xx) const {
        return (((n * g.c_in + c) * g.d + z) * static_cast<std::size_t>(g.h) + y) * g.w + xx;
    }
    std::size_t y(std::size_t n, std::size_t f, int z, int yy, int x) const {
        return (((n * g.c_out + f) * g.od() + z) * static_cast<std::size_t>(g.oh()) + yy) * g.ow() + x;
    }
    std::size_t w(std::size_t f, std::size_t c, int kz, int ky, int kx) const {
        return (((f * g.c_in + c) * g.k + kz) * static_cast<std::size_t>(g.k) + ky) * g.k + kx;
    }
    bool inside(int z, int y, int x) const { return z >= 0 && y >= 0 && x >= 0 && z < g.d && y < g.h && x < g.w; }
};

// Calls fn(n, f, c, oz, oy, ox, kz, ky, kx, iz, iy, ix) for every valid tap.
template <typename Fn>
void for_each_tap(const ConvGeometry& g, Fn fn) {
    const Indexer ix{g};
    for (std::size_t n = 0; n < g.batch; ++n)
        for (std::size_t f = 0; f < g.c_out; ++f)
            for (int oz = 0; oz < g.od(); ++oz)
                for (int oy = 0; oy < g.oh(); ++oy)
                    for (int ox = 0; ox < g.ow(); ++ox)
                        for (std::size_t c = 0; c < g.c_in; ++c)
                            for (int kz = 0; kz < g.k; ++kz)
                                for (int ky = 0; ky < g.k; ++ky)
                                    for (int kx = 0; kx < g.k; ++kx) {
                                        const int iz = oz * g.stride - g.pad + kz;
                                        const int iy = oy * g.stride - g.pad + ky;
                                        const int ixx = ox * g.stride - g.pad + kx;
                                        if (!ix.inside(iz, iy, ixx)) continue;
                                        fn(ix.x(n, c, iz, iy, ixx), ix.y(n, f, oz, oy, ox), ix.w(f, c, kz, ky, kx));
                                    }
}

}  // namespace

void conv3d_forward(const ConvGeometry& g, std::span<const double> x, std::span<const double> w,
                    std::span<const double> bias, std::span<double> y) {
    const Indexer ix{g};
    for (std::size_t n = 0; n < g.batch; ++n)
        for (std::size_t f = 0; f < g.c_out; ++f)
            for (int oz = 0; oz < g.od(); ++oz)
                for (int oy = 0; oy < g.oh(); ++oy)
                    for (int ox = 0; ox < g.ow(); ++ox) y[ix.y(n, f, oz, oy, ox)] = bias.empty() ? 0.0 : bias[f];
    for_each_tap(g, [&](std::size_t xi, std::size_t yi, std::size_t wi) { y[yi] += w[wi] * x[xi]; });
}

void conv3d_backward_input(const ConvGeometry& g, std::span<const double> gy, std::span<const double> w,
                           std::span<double> gx) {
    std::fill(gx.begin(), gx.end(), 0.0);
    for_each_tap(g, [&](std::size_t xi, std::size_t yi, std::size_t wi) { gx[xi] += w[wi] * gy[yi]; });
}

void conv3d_backward_weight(const ConvGeometry& g, std::span<const double> x, std::span<const double> gy,
                            std::span<double> gw, std::span<double> gb) {
    for_each_tap(g, [&](std::size_t xi, std::size_t yi, std::size_t wi) { gw[wi] += gy[yi] * x[xi]; });
    if (gb.empty()) return;
    const Indexer ix{g};
    for (std::size_t n = 0; n < g.batch; ++n)
        for (std::size_t f = 0; f < g.c_out; ++f)
            for (int oz = 0; oz < g.od(); ++oz)
                for (int oy = 0; oy < g.oh(); ++oy)
                    for (int ox = 0; ox < g.ow(); ++ox) gb[f] += gy[ix.y(n, f, oz, oy, ox)];
}

}  // namespace voxforge::kernels::reference
