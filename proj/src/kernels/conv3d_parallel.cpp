// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <string>

#include "voxforge/error.hpp"
#include "voxforge/kernels/conv3d.hpp"

namespace voxforge::kernels {

void ConvGeometry::validate() const {
    if (batch < 1 || c_in < 1 || c_out < 1 || k < 1 || stride < 1 || pad < 0 || d < 1 || h < 1 || w < 1) {
        throw ShapeError("conv3d: non-positive geometry");
    }
    if (d + 2 * pad < k || h + 2 * pad < k || w + 2 * pad < k) {
        throw ShapeError("conv3d: padded input (" + std::to_string(d) + "+2*" + std::to_string(pad) +
                         ") smaller than kernel " + std::to_string(k));
    }
}

int transposed_extent(int in, int k, int stride, int pad) { return (in - 1) * stride - 2 * pad + k; }

namespace parallel {

namespace {

// Output positions o with o*stride - pad + kk == i for some kk in [0, k).
inline void gather_range(int i, int pad, int k, int stride, int out, int& lo, int& hi) {
    const int num_hi = i + pad;           // o*stride <= i + pad
    const int num_lo = i + pad - k + 1;   // o*stride >= i + pad - k + 1
    lo = num_lo <= 0 ? 0 : (num_lo + stride - 1) / stride;
    hi = std::min(out - 1, num_hi / stride);
}

}  // namespace

void conv3d_forward(const ConvGeometry& g, std::span<const double> x, std::span<const double> w,
                    std::span<const double> bias, std::span<double> y) {
    const int od = g.od(), oh = g.oh(), ow = g.ow();
    const int k = g.k, s = g.stride, p = g.pad;
    const std::size_t in_plane = static_cast<std::size_t>(g.h) * g.w;
    const std::size_t in_vol = in_plane * g.d;
    const std::size_t k3 = static_cast<std::size_t>(k) * k * k;
    const auto total = static_cast<long>(g.batch * g.c_out * od);
#pragma omp parallel for schedule(static)
    for (long task = 0; task < total; ++task) {
        const int oz = static_cast<int>(task % od);
        const std::size_t f = (static_cast<std::size_t>(task) / od) % g.c_out;
        const std::size_t n = static_cast<std::size_t>(task) / (static_cast<std::size_t>(od) * g.c_out);
        const int kz0 = std::max(0, p - oz * s);
        const int kz1 = std::min(k, g.d + p - oz * s);
        for (int oy = 0; oy < oh; ++oy) {
            const int ky0 = std::max(0, p - oy * s);
            const int ky1 = std::min(k, g.h + p - oy * s);
            for (int ox = 0; ox < ow; ++ox) {
                const int kx0 = std::max(0, p - ox * s);
                const int kx1 = std::min(k, g.w + p - ox * s);
                double acc = bias.empty() ? 0.0 : bias[f];
                for (std::size_t c = 0; c < g.c_in; ++c) {
                    const double* xc = x.data() + (n * g.c_in + c) * in_vol;
                    const double* wc = w.data() + (f * g.c_in + c) * k3;
                    for (int kz = kz0; kz < kz1; ++kz) {
                        const int iz = oz * s - p + kz;
                        for (int ky = ky0; ky < ky1; ++ky) {
                            const int iy = oy * s - p + ky;
                            const double* xrow = xc + static_cast<std::size_t>(iz) * in_plane +
                                                 static_cast<std::size_t>(iy) * g.w;
                            const double* wrow = wc + (static_cast<std::size_t>(kz) * k + ky) * k;
                            const int x0 = ox * s - p;
                            for (int kx = kx0; kx < kx1; ++kx) acc += wrow[kx] * xrow[x0 + kx];
                        }
                    }
                }
                y[((n * g.c_out + f) * od + oz) * static_cast<std::size_t>(oh) * ow +
                  static_cast<std::size_t>(oy) * ow + ox] = acc;
            }
        }
    }
}

void conv3d_backward_input(const ConvGeometry& g, std::span<const double> gy, std::span<const double> w,
                           std::span<double> gx) {
    const int od = g.od(), oh = g.oh(), ow = g.ow();
    const int k = g.k, s = g.stride, p = g.pad;
    const std::size_t out_plane = static_cast<std::size_t>(oh) * ow;
    const std::size_t out_vol = out_plane * od;
    const std::size_t k3 = static_cast<std::size_t>(k) * k * k;
    const auto total = static_cast<long>(g.batch * g.c_in * g.d);
#pragma omp parallel for schedule(static)
    for (long task = 0; task < total; ++task) {
        const int iz = static_cast<int>(task % g.d);
        const std::size_t c = (static_cast<std::size_t>(task) / g.d) % g.c_in;
        const std::size_t n = static_cast<std::size_t>(task) / (static_cast<std::size_t>(g.d) * g.c_in);
        int oz0, oz1;
        gather_range(iz, p, k, s, od, oz0, oz1);
        for (int iy = 0; iy < g.h; ++iy) {
            int oy0, oy1;
            gather_range(iy, p, k, s, oh, oy0, oy1);
            for (int ix = 0; ix < g.w; ++ix) {
                int ox0, ox1;
                gather_range(ix, p, k, s, ow, ox0, ox1);
                double acc = 0.0;
                for (std::size_t f = 0; f < g.c_out; ++f) {
                    const double* gyf = gy.data() + (n * g.c_out + f) * out_vol;
                    const double* wf = w.data() + (f * g.c_in + c) * k3;
                    for (int oz = oz0; oz <= oz1; ++oz) {
                        const int kz = iz + p - oz * s;
                        for (int oy = oy0; oy <= oy1; ++oy) {
                            const int ky = iy + p - oy * s;
                            const double* grow = gyf + static_cast<std::size_t>(oz) * out_plane +
                                                 static_cast<std::size_t>(oy) * ow;
                            const double* wrow = wf + (static_cast<std::size_t>(kz) * k + ky) * k;
                            for (int ox = ox0; ox <= ox1; ++ox) acc += grow[ox] * wrow[ix + p - ox * s];
                        }
                    }
                }
                gx[((n * g.c_in + c) * g.d + iz) * static_cast<std::size_t>(g.h) * g.w +
                   static_cast<std::size_t>(iy) * g.w + ix] = acc;
            }
        }
    }
}

void conv3d_backward_weight(const ConvGeometry& g, std::span<const double> x, std::span<const double> gy,
                            std::span<double> gw, std::span<double> gb) {
    const int od = g.od(), oh = g.oh(), ow = g.ow();
    const int k = g.k, s = g.stride, p = g.pad;
    const std::size_t in_plane = static_cast<std::size_t>(g.h) * g.w;
    const std::size_t in_vol = in_plane * g.d;
    const std::size_t out_plane = static_cast<std::size_t>(oh) * ow;
    const std::size_t out_vol = out_plane * od;
    const std::size_t k3 = static_cast<std::size_t>(k) * k * k;
    const auto pairs = static_cast<long>(g.c_out * g.c_in);
#pragma omp parallel for schedule(static)
    for (long task = 0; task < pairs; ++task) {
        const std::size_t f = static_cast<std::size_t>(task) / g.c_in;
        const std::size_t c = static_cast<std::size_t>(task) % g.c_in;
        double* gwc = gw.data() + (f * g.c_in + c) * k3;
        for (std::size_t n = 0; n < g.batch; ++n) {
            const double* xc = x.data() + (n * g.c_in + c) * in_vol;
            const double* gyf = gy.data() + (n * g.c_out + f) * out_vol;
            for (int oz = 0; oz < od; ++oz) {
                const int kz0 = std::max(0, p - oz * s);
                const int kz1 = std::min(k, g.d + p - oz * s);
                for (int oy = 0; oy < oh; ++oy) {
                    const int ky0 = std::max(0, p - oy * s);
                    const int ky1 = std::min(k, g.h + p - oy * s);
                    for (int ox = 0; ox < ow; ++ox) {
                        const double go = gyf[static_cast<std::size_t>(oz) * out_plane +
                                              static_cast<std::size_t>(oy) * ow + ox];
                        if (go == 0.0) continue;
                        const int kx0 = std::max(0, p - ox * s);
                        const int kx1 = std::min(k, g.w + p - ox * s);
                        for (int kz = kz0; kz < kz1; ++kz) {
                            const int iz = oz * s - p + kz;
                            for (int ky = ky0; ky < ky1; ++ky) {
                                const int iy = oy * s - p + ky;
                                const double* xrow = xc + static_cast<std::size_t>(iz) * in_plane +
                                                     static_cast<std::size_t>(iy) * g.w;
                                double* grow = gwc + (static_cast<std::size_t>(kz) * k + ky) * k;
                                const int x0 = ox * s - p;
                                for (int kx = kx0; kx < kx1; ++kx) grow[kx] += go * xrow[x0 + kx];
                            }
                        }
                    }
                }
            }
        }
    }
    if (!gb.empty()) {
        const auto fs = static_cast<long>(g.c_out);
#pragma omp parallel for schedule(static)
        for (long fi = 0; fi < fs; ++fi) {
            const auto f = static_cast<std::size_t>(fi);
            double acc = 0.0;
            for (std::size_t n = 0; n < g.batch; ++n) {
                const double* gyf = gy.data() + (n * g.c_out + f) * out_vol;
                for (std::size_t i = 0; i < out_vol; ++i) acc += gyf[i];
            }
            gb[f] += acc;
        }
    }
}

}  // namespace parallel

}  // namespace voxforge::kernels
